#include "fracsync/cli.hpp"

int main(int argc, char** argv) { return fracsync::run(argc, argv); }
