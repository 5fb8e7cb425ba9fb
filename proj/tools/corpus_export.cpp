// Writes the bundled example games to a directory as JSON files.
#include <cstdio>

#include "eqidx/constructions.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: corpus_export <dir>\n");
    return 2;
  }
  eqidx::write_corpus(argv[1]);
  return 0;
}
