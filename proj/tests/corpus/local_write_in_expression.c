// entry: main()
int main(void) { int a = 1; int b = (a = a + 1) + a; return b; }
