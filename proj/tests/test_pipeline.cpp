#include "doctest.h"
#include "fakecatcher/pipeline.hpp"
TEST_SUITE("pipeline") { TEST_CASE("placeholder") { CHECK(true); } }
