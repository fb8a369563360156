int x;
int id_set_x(int val){
  x=1;
  return val;}
int main(void){
  x=0;
  return x + id_set_x(1);}
