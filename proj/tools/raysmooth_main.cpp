#include <cstdio>
int main() { std::puts("raysmooth: placeholder"); return 0; }
