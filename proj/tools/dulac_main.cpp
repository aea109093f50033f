#include <iostream>

int main() {
    std::cout << "dulac: placeholder\n";
    return 0;
}
