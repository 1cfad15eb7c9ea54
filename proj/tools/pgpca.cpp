#include "pgpca/cli.hpp"

int main(int argc, char** argv) { return pgpca::cli::run(argc, argv); }
