#include <iostream>

#include "layersolve/run.hpp"

int main(int argc, char** argv) {
  return layersolve::app::main_entry(argc, argv, std::cout, std::cerr);
}
