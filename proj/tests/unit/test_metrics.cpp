#include <doctest.h>

#include <cmath>
#include <random>

#include "error.hpp"
#include "helpers.hpp"
#include "metrics.hpp"

using namespace spa;

TEST_CASE("binarize is strict at the threshold") {
  for (double v : test::px(binarize(Image(4, 4, 0.6)))) CHECK(v == 1.0);
  for (double v : test::px(binarize(Image(4, 4, 0.5)))) CHECK(v == 0.0);
  Image checker(6, 6);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) checker(r, c) = (r + c) % 2 ? 0.51 : 0.49;
  const Image b = binarize(checker);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) CHECK(b(r, c) == ((r + c) % 2 ? 1.0 : 0.0));
}

TEST_CASE("dice_loss") {
  Image a(4, 4), b(4, 4);
  for (int c = 0; c < 4; ++c) a(0, c) = 1.0;
  CHECK(std::abs(dice_loss(a, a)) < 1e-6);
  for (int c = 0; c < 4; ++c) b(3, c) = 1.0;
  CHECK(std::abs(dice_loss(a, b) - 1.0) < 1e-6);
  Image h(4, 4);
  h(0, 0) = h(0, 1) = h(1, 0) = h(1, 1) = 1.0;  // overlaps a in 2 pixels
  CHECK(std::abs(dice_loss(a, h) - 0.5) < 1e-6);
  CHECK(dice_loss(a, h) == dice_loss(h, a));
  // both empty: smoothing keeps the value defined
  CHECK(dice_loss(Image(4, 4), Image(4, 4)) == 0.0);
  CHECK_THROWS_AS(dice_loss(Image(4, 4), Image(3, 4)), ValidationError);
}

TEST_CASE("mse_in_mask") {
  std::mt19937_64 gen(4);
  const Image gt = test::random_image(8, 8, gen, 0.0, 1.0);
  const Image mask = test::random_mask(8, 8, gen, 0.3);
  CHECK(mse_in_mask(gt, gt, mask) == 0.0);
  Image pred = test::random_image(8, 8, gen, -5.0, 5.0);  // garbage outside
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (mask[i] > 0) pred[i] = gt[i] + 0.1;
  CHECK(mse_in_mask(pred, gt, mask) == doctest::Approx(0.01).epsilon(1e-12));

  Image m2(2, 2), p2(2, 2), g2(2, 2);
  m2(0, 0) = m2(1, 1) = 1.0;
  p2(1, 1) = 0.2;
  p2(0, 1) = 9.0;
  CHECK(mse_in_mask(p2, g2, m2) == doctest::Approx(0.02).epsilon(1e-12));
  CHECK_THROWS_AS(mse_in_mask(p2, g2, Image(2, 2)), ValidationError);
}

TEST_CASE("plain_mse_loss") {
  const Image gt(5, 5, 0.3);
  CHECK(plain_mse_loss(gt, gt) == 0.0);
  CHECK(plain_mse_loss(Image(5, 5, 0.55), gt) == doctest::Approx(0.0625).epsilon(1e-12));
  Image g4(2, 2), p4(2, 2);
  p4(1, 1) = 0.4;
  CHECK(plain_mse_loss(p4, g4) == doctest::Approx(0.04).epsilon(1e-12));
}

TEST_CASE("hybrid_loss") {
  Image seg(8, 8);
  for (int r = 2; r < 5; ++r)
    for (int c = 1; c < 6; ++c) seg(r, c) = 1.0;
  std::mt19937_64 gen(8);
  Image so2 = test::random_image(8, 8, gen, 0.0, 0.8);
  for (std::size_t i = 0; i < so2.size(); ++i) so2[i] *= seg[i];

  CHECK(std::abs(hybrid_loss(seg, seg, so2, so2)) < 1e-6);
  Image off = so2;
  for (std::size_t i = 0; i < off.size(); ++i)
    if (seg[i] > 0) off[i] += 0.1;
  CHECK(std::abs(hybrid_loss(seg, seg, off, so2) - 0.005) < 1e-6);
  CHECK(hybrid_loss(seg, seg, off, so2, SegLossKind::Mse) == doctest::Approx(0.005).epsilon(1e-12));

  Image disjoint(8, 8);
  disjoint(7, 7) = 1.0;
  CHECK(std::abs(hybrid_loss(disjoint, seg, so2, so2) - 0.5) < 1e-6);
  CHECK(hybrid_loss(disjoint, seg, so2, so2, SegLossKind::Mse) ==
        doctest::Approx(0.5 * plain_mse_loss(disjoint, seg)).epsilon(1e-12));
}

TEST_CASE("hybrid_loss ignores sO2 outside the ground-truth mask") {
  std::mt19937_64 gen(12);
  for (int t = 0; t < 200; ++t) {
    const Image seg_gt = test::random_mask(16, 16, gen, 0.2);
    if (test::sum(seg_gt) == 0) continue;
    const Image seg_pred = test::random_image(16, 16, gen, 0.0, 1.0);
    const Image so2_gt = test::random_image(16, 16, gen, 0.0, 1.0);
    const Image so2_pred = test::random_image(16, 16, gen, 0.0, 1.0);
    Image perturbed = so2_pred;
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    for (std::size_t i = 0; i < perturbed.size(); ++i)
      if (seg_gt[i] == 0) perturbed[i] = u(gen);
    for (auto kind : {SegLossKind::Dice, SegLossKind::Mse}) {
      const double a = hybrid_loss(seg_pred, seg_gt, so2_pred, so2_gt, kind);
      const double b = hybrid_loss(seg_pred, seg_gt, perturbed, so2_gt, kind);
      REQUIRE(a == b);
      REQUIRE(a >= 0.0);
      REQUIRE(a <= 1.0);
    }
  }
}

TEST_CASE("final_so2") {
  std::mt19937_64 gen(1);
  const Image so2 = test::random_image(6, 6, gen, 0.0, 1.0);
  CHECK(final_so2(Image(6, 6, 1.0), so2) == so2);
  for (double v : test::px(final_so2(Image(6, 6), so2))) CHECK(v == 0.0);
  Image one(6, 6);
  one(2, 3) = 1.0;
  const Image f = final_so2(one, so2);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) CHECK(f(r, c) == (r == 2 && c == 3 ? so2(2, 3) : 0.0));
}

TEST_CASE("seg_stats") {
  std::mt19937_64 gen(21);
  const Image gt = test::random_mask(16, 16, gen, 0.3);
  auto s = seg_stats(gt, gt);
  CHECK(s.fpr == 0.0);
  CHECK(s.fnr == 0.0);
  CHECK(s.accuracy == 1.0);

  const double k = test::sum(gt);
  s = seg_stats(Image(16, 16), gt);
  CHECK(s.fnr == 1.0);
  CHECK(s.fpr == 0.0);
  CHECK(s.accuracy == doctest::Approx((256 - k) / 256).epsilon(1e-15));

  s = seg_stats(Image(4, 4, 1.0), Image(4, 4, 1.0));
  CHECK(s.fpr_undefined);
  CHECK_FALSE(s.fnr_undefined);
  CHECK(s.fpr == 0.0);
  s = seg_stats(Image(4, 4), Image(4, 4));
  CHECK(s.fnr_undefined);
  CHECK(s.fnr == 0.0);
}

TEST_CASE("metrics agree with brute-force counting") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> up(0.05, 0.6);
  for (int t = 0; t < 1000; ++t) {
    const Image pred = test::random_mask(16, 16, gen, up(gen));
    const Image gt = test::random_mask(16, 16, gen, up(gen));
    const Image so2p = test::random_image(16, 16, gen, 0.0, 1.0);
    const Image so2g = test::random_image(16, 16, gen, 0.0, 1.0);
    std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;
    double inter = 0, sp = 0, sg = 0, se = 0;
    for (int r = 0; r < 16; ++r)
      for (int c = 0; c < 16; ++c) {
        const bool p = pred(r, c) == 1.0, g = gt(r, c) == 1.0;
        tp += p && g;
        tn += !p && !g;
        fp += p && !g;
        fn += !p && g;
        inter += p && g;
        sp += p;
        sg += g;
        if (g) se += (so2p(r, c) - so2g(r, c)) * (so2p(r, c) - so2g(r, c));
      }
    const auto s = seg_stats(pred, gt);
    REQUIRE(s.tp == tp);
    REQUIRE(s.tn == tn);
    REQUIRE(s.fp == fp);
    REQUIRE(s.fn == fn);
    if (fp + tn > 0) REQUIRE(std::abs(s.fpr - double(fp) / double(fp + tn)) <= 1e-12);
    if (fn + tp > 0) REQUIRE(std::abs(s.fnr - double(fn) / double(fn + tp)) <= 1e-12);
    REQUIRE(std::abs(s.accuracy - double(tp + tn) / 256.0) <= 1e-12);
    const double dice = 1.0 - (2 * inter + kDiceSmoothing) / (sp + sg + kDiceSmoothing);
    REQUIRE(std::abs(dice_loss(pred, gt) - dice) <= 1e-12);
    if (sg > 0) REQUIRE(std::abs(mse_in_mask(so2p, so2g, gt) - se / sg) <= 1e-12);
  }
}

TEST_CASE("fnr exceeds fpr for uniform errors on a minority class") {
  std::mt19937_64 gen(5);
  const Image gt = test::random_mask(64, 64, gen, 0.1);
  Image pred = gt;
  std::bernoulli_distribution flip(0.05);
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (flip(gen)) pred[i] = 1.0 - pred[i];
  const auto s = seg_stats(pred, gt);
  CHECK(s.fn + s.fp > 0);
  CHECK(s.accuracy > 0.9);
}

TEST_CASE("summarize and EvalReport") {
  auto s = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == 2.5);
  CHECK(s.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-14));
  s = summarize({7.0});
  CHECK(s.mean == 7.0);
  CHECK(s.stddev == 0.0);
  s = summarize({});
  CHECK(s.mean == 0.0);

  Image gt(8, 8);
  gt(2, 2) = gt(2, 3) = 1.0;
  Image so2(8, 8);
  so2(2, 2) = 0.7;
  so2(2, 3) = 0.9;
  EvalReport rep;
  rep.samples.push_back(evaluate_sample("a", gt, so2, gt, so2));
  Image noisy = so2;
  noisy(2, 2) = 0.5;
  Image prob = gt;
  prob(5, 5) = 0.8;  // one false positive after binarization
  rep.samples.push_back(evaluate_sample("b", prob, noisy, gt, so2));
  CHECK(rep.samples[0].so2_mse_in_gt_mask == 0.0);
  CHECK(rep.samples[0].seg.accuracy == 1.0);
  CHECK(rep.samples[1].so2_mse_in_gt_mask == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(rep.samples[1].seg.fp == 1);
  CHECK(rep.so2_mse().mean == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(rep.so2_mse().stddev == doctest::Approx(std::sqrt(2 * 0.01 * 0.01)).epsilon(1e-12));

  const std::string csv = rep.to_csv();
  CHECK(csv.find("\na,") != std::string::npos);
  CHECK(csv.find("\nb,") != std::string::npos);
  CHECK(csv.find("\nmean,") != std::string::npos);
  CHECK(csv.find("\nstd,") != std::string::npos);
  CHECK(csv.rfind("id,", 0) == 0);
}
