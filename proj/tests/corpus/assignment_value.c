// entry: main()
int x;
int main(void) { int y = 0; y = (x = 3) + x; return y; }
