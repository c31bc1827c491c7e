#include <iostream>
int main(){std::cout << "wg placeholder\n";}
