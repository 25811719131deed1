#include <cstdio>

int main() {
    std::puts("taas: cli not wired yet");
    return 0;
}
