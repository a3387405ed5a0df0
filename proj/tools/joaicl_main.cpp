#include <cstdio>
int main(){ std::puts("joaicl"); return 0; }
