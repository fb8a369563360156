// entry: main()
int g;
int put(const int v) { g = v; return 0; }
int main(void) { g = 0; return put(1) + put(2) + g; }
