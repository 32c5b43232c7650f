#include "sasc/app/cli.hpp"

int main(int argc, char** argv) { return sasc::app::main_entry(argc, argv); }
