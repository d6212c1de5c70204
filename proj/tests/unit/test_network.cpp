#include <gtest/gtest.h>

#include "surropt/errors.hpp"
#include "surropt/network.hpp"

namespace surropt {
namespace {

TEST(NetworkShape, ReferenceSizes) {
  const NetworkShape s;
  EXPECT_EQ(s.input_size(), 44u);
  EXPECT_EQ(s.output_size(), 136u);
  EXPECT_THROW((NetworkShape{0, 11}).validate(), ConfigError);
}

TEST(DecisionVector, FlatRoundTripAndLayout) {
  const NetworkShape s;
  DecisionVector d(s);
  d.order(2) = 5;
  d.ship(0, 1, 0) = 1;
  d.ship(3, 2, 10) = 7;
  const auto flat = d.to_flat();
  ASSERT_EQ(flat.size(), 136u);
  EXPECT_EQ(flat[2], 5);
  EXPECT_EQ(flat[4], 1);       // first ship entry: 1 -> 2, age 1
  EXPECT_EQ(flat[135], 7);     // last ship entry: 4 -> 3, age 11
  EXPECT_EQ(DecisionVector::from_flat(s, flat), d);
  const auto names = decision_column_names(s);
  EXPECT_EQ(names[0], "ord_1");
  EXPECT_EQ(names[4], "ship_1_2_1");
  EXPECT_EQ(names[135], "ship_4_3_11");
}

TEST(DecisionVector, DiagonalIsAlwaysZero) {
  DecisionVector d(NetworkShape{});
  EXPECT_THROW(d.ship(1, 1, 0), ContractViolation);
  const DecisionVector& cd = d;
  EXPECT_EQ(cd.ship(1, 1, 0), 0);
}

TEST(DecisionVector, WrongFlatLengthRejected) {
  std::vector<Units> flat(10, 0);
  EXPECT_THROW(DecisionVector::from_flat(NetworkShape{}, flat), InputError);
}

TEST(InventoryState, FeaturesAreHospitalMajor) {
  InventoryState s(NetworkShape{});
  s.at(1, 3) = 4;
  const auto f = s.to_features();
  ASSERT_EQ(f.size(), 44u);
  EXPECT_EQ(f[11 + 3], 4.0);
  EXPECT_EQ(inventory_column_names(NetworkShape{})[14], "inv_2_4");
  EXPECT_EQ(s.total(), 4);
}

}  // namespace
}  // namespace surropt
