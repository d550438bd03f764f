#include <unistd.h>

#include <iostream>
#include <string>
#include <vector>

#include "log4shield/cli.hpp"
#include "log4shield/kb_default.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    const bool tty = isatty(STDOUT_FILENO) == 1;
    return log4shield::cli::run(std::move(args), log4shield::default_kb_text(), std::cout, std::cerr,
                                log4shield::cli::Env::from_process(), tty);
}
