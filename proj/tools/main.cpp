#include <cstdio>

int main() {
    std::puts("affvqa: placeholder");
    return 0;
}
