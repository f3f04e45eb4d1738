#include "zmlab/commands.hpp"
int main(){return 0;}
