#include <cstdio>

int main() {
  std::puts("eetsim: CLI under construction");
  return 1;
}
