#include "quadrank/run.hpp"

int main(int argc, char** argv) { return quadrank::main_entry(argc, argv); }
