// entry: fact(1)
// entry: fact(5)
int fact(const int n) {
  if (n <= 1) { return 1; }
  return n * fact(n - 1);
}
