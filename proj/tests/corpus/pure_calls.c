// entry: main()
// entry: sq(7)
int sq(const int a) { return a * a; }
int main(void) { return sq(3) + sq(4); }
