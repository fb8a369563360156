// entry: main()
int g;
int t(void) { g = 5; return 1; }
int main(void) {
  g = 0;
  if (g == 0 || t() == 1) { return g; }
  return 9;
}
