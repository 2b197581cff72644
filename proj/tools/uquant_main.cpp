#include "uquant/cli.hpp"

int main(int argc, char** argv) { return uquant::main_entry(argc, argv); }
