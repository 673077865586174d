#include "contourlab/error.hpp"
#include "contourlab/rational.hpp"

#include <gtest/gtest.h>

using contourlab::Rational;

TEST(Rational, NormalizesSignAndGcd) {
    const Rational r(6, -8);
    EXPECT_EQ(r.num(), -3);
    EXPECT_EQ(r.den(), 4);
}

TEST(Rational, DecimalWhenTerminating) {
    EXPECT_EQ(Rational(3, 4).to_string(), "0.75");
    EXPECT_EQ(Rational(3, 8).to_string(), "0.375");
    EXPECT_EQ(Rational(2).to_string(), "2");
    EXPECT_EQ(Rational(6, 5).to_string(), "1.2");
}

TEST(Rational, FractionOtherwise) { EXPECT_EQ(Rational(4, 3).to_string(), "4/3"); }

TEST(Rational, ParseAcceptsAllForms) {
    EXPECT_EQ(Rational::parse("3"), Rational(3));
    EXPECT_EQ(Rational::parse("0.375"), Rational(3, 8));
    EXPECT_EQ(Rational::parse("-1.5"), Rational(-3, 2));
    EXPECT_EQ(Rational::parse("4/3"), Rational(4, 3));
    EXPECT_THROW(Rational::parse("x"), contourlab::Error);
    EXPECT_THROW(Rational::parse("1/0"), contourlab::Error);
}

TEST(Rational, RoundTripsThroughText) {
    for (const Rational r : {Rational(1, 3), Rational(7, 16), Rational(5), Rational(9, 12), Rational(1, 6)})
        EXPECT_EQ(Rational::parse(r.to_string()), r);
}

TEST(Rational, Arithmetic) {
    EXPECT_EQ(Rational(1, 3) + Rational(1, 6), Rational(1, 2));
    EXPECT_EQ(Rational(2, 3) * Rational(3, 4), Rational(1, 2));
    EXPECT_LT(Rational(1, 3), Rational(1, 2));
    EXPECT_LE(Rational(1, 2), Rational(2, 4));
}
