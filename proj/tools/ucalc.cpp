#include <cstdio>
int main() { std::puts("ucalc placeholder"); return 0; }
