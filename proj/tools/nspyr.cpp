#include <iostream>

#include "app.hpp"

int main(int argc, char** argv) { return nspyr::main(argc, argv, std::cout, std::cerr); }
