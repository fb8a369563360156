// entry: main()
int x;
int add(const int v) { x = x + v; return x; }
int main(void) { x = 0; return add(1) * 100 + add(2) * 10 + add(4); }
