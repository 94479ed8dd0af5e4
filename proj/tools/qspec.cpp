#include <string>
#include <vector>

#include "qspec/cli.hpp"

int main(int argc, char** argv) { return qspec::run_cli(std::vector<std::string>(argv, argv + argc)); }
