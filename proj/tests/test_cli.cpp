#include <catch2/catch_amalgamated.hpp>
int placeholder_cli;
