// entry: count(0)
// entry: count(4)
int count(const int n) {
  int i = 0;
  int s = 0;
  while (i < n) { s = s + i; i = i + 1; }
  return s;
}
