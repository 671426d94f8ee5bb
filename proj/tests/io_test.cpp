#include <gtest/gtest.h>
TEST(Placeholder_io, Builds) { SUCCEED(); }
