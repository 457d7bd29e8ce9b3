#include <gtest/gtest.h>

#include <cstring>

#include "lfg/error.hpp"
#include "lfg/model_io.hpp"
#include "support/synthetic.hpp"
#include "support/temp_dir.hpp"

namespace lfg {
namespace {

FactorModel trained_model(int k = 10) {
  auto ds = testing::planted_dataset(25, 30, 3, 0.5, 3.4, 21, 0.2);
  TrainingConfig cfg;
  cfg.factor_count = k;
  cfg.iterations = 3;
  return train(ds, cfg);
}

TEST(ModelIo, RoundTripIsBitExact) {
  const FactorModel m = trained_model();
  const std::string bytes = save_model(m);
  const FactorModel back = load_model(bytes);
  EXPECT_TRUE(back == m);
  EXPECT_EQ(std::memcmp(back.user_factors.data(), m.user_factors.data(), sizeof(double) * m.user_factors.size()), 0);
  EXPECT_EQ(save_model(back), bytes);
}

TEST(ModelIo, HeaderRecordsFactorCount) {
  const auto h = read_model_header(save_model(trained_model(10)));
  EXPECT_EQ(h.factor_count, 10u);
  EXPECT_EQ(h.version, kModelFormatVersion);
  EXPECT_EQ(h.scalar_bytes, 8u);
  EXPECT_EQ(h.user_count, 25u);
}

TEST(ModelIo, TruncatedPayloadIsRejected) {
  const std::string bytes = save_model(trained_model(4));
  for (std::size_t cut : {std::size_t{0}, std::size_t{3}, std::size_t{20}, std::size_t{41}, bytes.size() / 2,
                          bytes.size() - 1}) {
    try {
      load_model(std::string_view(bytes).substr(0, cut));
      FAIL() << "cut at " << cut;
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == "truncated_model" || e.code() == "bad_model") << e.code();
    }
  }
}

TEST(ModelIo, VersionAndScalarMismatch) {
  std::string bytes = save_model(trained_model(2));
  std::string wrong_version = bytes;
  wrong_version[4] = 9;
  try {
    load_model(wrong_version);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "model_version");
  }
  EXPECT_THROW(load_model<float>(bytes), Error);
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(load_model(bad_magic), Error);
  EXPECT_THROW(load_model(bytes + "x"), Error);
}

TEST(ModelIo, FileRoundTrip) {
  testing::TempDir dir;
  const FactorModel m = trained_model(3);
  save_model_file(m, dir.path() / "m.bin");
  EXPECT_TRUE(load_model_file(dir.path() / "m.bin") == m);
  EXPECT_THROW(load_model_file(dir.path() / "missing.bin"), Error);
}

TEST(ModelIo, FloatModelRoundTrip) {
  BasicFactorModel<float> m(2, 3, 2);
  m.user_factors << 1.5f, -2.f, 0.25f, 3.f;
  m.item_bias << 0.1f, 0.2f, 0.3f;
  m.global_mean = 3.5f;
  m.users.intern(5);
  m.users.intern(6);
  for (int i = 0; i < 3; ++i) m.items.intern(100 + i);
  EXPECT_TRUE(load_model<float>(save_model(m)) == m);
}

}  // namespace
}  // namespace lfg
