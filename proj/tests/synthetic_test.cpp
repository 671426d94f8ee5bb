#include <gtest/gtest.h>
TEST(Placeholder_synthetic, Builds) { SUCCEED(); }
