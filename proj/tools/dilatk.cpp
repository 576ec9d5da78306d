#include <cstdio>
int main(){ std::puts("dilatk placeholder"); return 0; }
