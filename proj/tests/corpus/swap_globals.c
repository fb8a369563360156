// entry: main()
int a;
int b;
int swap(void) { int t = a; a = b; b = t; return 0; }
int main(void) { a = 1; b = 2; return swap() + a * 10 + b; }
