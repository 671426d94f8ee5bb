#include <gtest/gtest.h>
TEST(Placeholder_quality, Builds) { SUCCEED(); }
