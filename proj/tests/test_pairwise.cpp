#include "doctest.h"
#include "fakecatcher/pairwise.hpp"
TEST_SUITE("pairwise") { TEST_CASE("placeholder") { CHECK(true); } }
