#include <cstdio>
#include <exception>
#include <string>

#include "s2w/acceptance.hpp"

int main(int argc, char** argv) {
    std::string work_dir = argc > 1 ? argv[1] : "acceptance-out";
    try {
        return s2w::acceptance_main(work_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance suite aborted: %s\n", e.what());
        return 2;
    }
}
