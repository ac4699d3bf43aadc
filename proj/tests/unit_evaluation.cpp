#include "pickauth/evaluation.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "pickauth/datagen.hpp"
#include "pickauth/dtw.hpp"
#include "pickauth/profile.hpp"
#include "pickauth/rng.hpp"
#include "pickauth/signal.hpp"

using namespace pickauth;
using namespace pickauth::eval;

namespace {

std::vector<LabeledDistance> labeled(const std::vector<double>& genuine,
                                     const std::vector<double>& impostor) {
  std::vector<LabeledDistance> out;
  for (double d : genuine) out.push_back(LabeledDistance{d, true, std::nullopt, "all"});
  for (double d : impostor) out.push_back(LabeledDistance{d, false, std::nullopt, "all"});
  return out;
}

std::vector<LabeledDistance> random_trials(Rng& rng, std::size_t n_gen, std::size_t n_imp) {
  std::vector<double> genuine(n_gen), impostor(n_imp);
  for (double& d : genuine) d = std::abs(rng.normal(0.5, 0.3));
  for (double& d : impostor) d = std::abs(rng.normal(1.2, 0.45));
  return labeled(genuine, impostor);
}

sig::PickUpSignal sample_of(const gen::UserMotionModel& model, int context, std::uint64_t seed,
                            const gen::GenParams& params = {}) {
  const auto g = gen::gen_pickup_trace(
      model, gen::GenScenario{gen::ScenarioKind::Genuine, context, true}, seed, params);
  auto signals = sig::extract_pickups(g.trace, sig::ExtractParams{});
  REQUIRE(signals.size() == 1);
  return signals.front();
}

// Small labeled population: `users` users x `reps` samples.
std::vector<sig::PickUpSignal> small_population(int users, int reps,
                                                const gen::GenParams& params = {}) {
  std::vector<sig::PickUpSignal> signals;
  for (int u = 0; u < users; ++u) {
    const auto model = gen::make_user(3000 + u, params);
    for (int r = 0; r < reps; ++r) {
      auto s = sample_of(model, r % 3, static_cast<std::uint64_t>(r), params);
      s.user_id = gen::user_label(u);
      signals.push_back(std::move(s));
    }
  }
  return signals;
}

}  // namespace

TEST_CASE("far_frr counts misclassifications at theta") {
  SUBCASE("theta beyond the largest distance accepts everything") {
    const auto d = labeled({1, 2, 3}, {2, 4, 5});
    const Rates r = far_frr(d, 10.0);
    CHECK(r.far == 1.0);
    CHECK(r.frr == 0.0);
  }
  SUBCASE("worked example: genuine {1,2,3}, impostor {2,4,5}, theta 2.5") {
    const auto d = labeled({1, 2, 3}, {2, 4, 5});
    const Rates r = far_frr(d, 2.5);
    CHECK(r.far == doctest::Approx(1.0 / 3.0));
    CHECK(r.frr == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("an empty class is flagged, not thrown") {
    const Rates no_imp = far_frr(labeled({1, 2}, {}), 1.5);
    CHECK_FALSE(no_imp.far_defined);
    CHECK(no_imp.far == 0.0);
    CHECK(no_imp.frr_defined);
    const Rates no_gen = far_frr(labeled({}, {1, 2}), 1.5);
    CHECK_FALSE(no_gen.frr_defined);
  }
}

TEST_CASE("accuracy is the correct-classification fraction") {
  CHECK(accuracy(labeled({1, 2, 3}, {2, 4, 5}), 2.5) == doctest::Approx(4.0 / 6.0));
  CHECK(accuracy(labeled({0.1, 0.2}, {3, 4}), 1.0) == 1.0);
}

TEST_CASE("rates agree with direct counting on random sets") {
  Rng rng(11);
  for (int iter = 0; iter < 50; ++iter) {
    const auto trials = random_trials(rng, 30, 50);
    const double theta = rng.uniform(0.0, 2.0);
    std::size_t fa = 0, fr = 0, n_gen = 0, n_imp = 0, correct = 0;
    for (const auto& t : trials) {
      const bool accepted = t.distance <= theta;
      if (t.genuine) {
        ++n_gen;
        if (!accepted) ++fr;
        if (accepted) ++correct;
      } else {
        ++n_imp;
        if (accepted) ++fa;
        if (!accepted) ++correct;
      }
    }
    const Rates r = far_frr(trials, theta);
    REQUIRE(r.far == static_cast<double>(fa) / n_imp);
    REQUIRE(r.frr == static_cast<double>(fr) / n_gen);
    REQUIRE(accuracy(trials, theta) == static_cast<double>(correct) / (n_gen + n_imp));
    // accuracy identity: 1 - (FAR*n_imp + FRR*n_gen)/(n_imp+n_gen)
    REQUIRE(accuracy(trials, theta) ==
            doctest::Approx(1.0 - (r.far * n_imp + r.frr * n_gen) / (n_gen + n_imp))
                .epsilon(1e-12));
  }
}

TEST_CASE("sweep produces monotone curves over the grid") {
  Rng rng(13);
  const auto trials = random_trials(rng, 40, 60);
  const auto grid = default_theta_grid(trials, 60);
  const EvalReport report = sweep(trials, grid);

  SUBCASE("single-point grid matches the scalar operations") {
    const EvalReport one = sweep(trials, {grid[10]});
    const Rates r = far_frr(trials, grid[10]);
    CHECK(one.far[0] == r.far);
    CHECK(one.frr[0] == r.frr);
    CHECK(one.accuracy[0] == accuracy(trials, grid[10]));
  }
  SUBCASE("far rises 0 to 1 and frr falls 1 to 0 across a full-span grid") {
    std::vector<double> full{0.0};
    for (const auto& t : trials) full.push_back(t.distance + 1e-9);
    std::sort(full.begin(), full.end());
    const EvalReport r = sweep(trials, full);
    CHECK(r.far.front() == 0.0);
    CHECK(r.far.back() == 1.0);
    CHECK(r.frr.front() == 1.0);
    CHECK(r.frr.back() == 0.0);
  }
  SUBCASE("monotonicity holds pointwise") {
    for (std::size_t i = 1; i < report.thetas.size(); ++i) {
      CHECK(report.far[i] >= report.far[i - 1]);
      CHECK(report.frr[i] <= report.frr[i - 1]);
    }
  }
  SUBCASE("unsorted or empty grids are rejected") {
    CHECK_THROWS_AS(sweep(trials, {2.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(sweep(trials, {}), std::invalid_argument);
  }
}

TEST_CASE("choose_threshold implements the three policies") {
  SUBCASE("perfectly separated classes: smallest theta with FAR 0 and max accuracy") {
    const auto trials = labeled({0.1, 0.2, 0.3}, {2.0, 2.5, 3.0});
    const std::vector<double> grid{0.05, 0.3, 1.0, 1.5, 2.2, 3.5};
    const EvalReport report = sweep(trials, grid);
    const double theta = choose_threshold(report, ThresholdPolicy::MinFarMaxAccuracy);
    CHECK(theta == 0.3);  // first grid point with FAR = 0 and accuracy 1
  }
  SUBCASE("min-far picks the global minimum FAR") {
    Rng rng(17);
    const auto trials = random_trials(rng, 30, 30);
    const auto grid = default_theta_grid(trials, 80);
    const EvalReport report = sweep(trials, grid);
    const double theta = choose_threshold(report, ThresholdPolicy::MinFarMaxAccuracy);
    const double min_far = *std::min_element(report.far.begin(), report.far.end());
    const Rates at = far_frr(trials, theta);
    CHECK(at.far == min_far);
  }
  SUBCASE("eer minimizes |far - frr|; worked example settles in the crossing region") {
    const auto trials = labeled({1, 2, 3}, {2, 4, 5});
    std::vector<double> grid;
    for (double t = 0.0; t <= 5.5; t += 0.01) grid.push_back(t);
    const EvalReport report = sweep(trials, grid);
    const double theta = choose_threshold(report, ThresholdPolicy::Eer);
    const Rates at = far_frr(trials, theta);
    CHECK(std::abs(at.far - at.frr) <= 1e-12);
    CHECK(theta >= 2.0);
    CHECK(theta < 3.0);
  }
  SUBCASE("target-frr returns the smallest admissible theta") {
    const auto trials = labeled({1, 2, 3, 4}, {3, 5, 6});
    std::vector<double> grid;
    for (double t = 0.0; t <= 7.0; t += 0.5) grid.push_back(t);
    const EvalReport report = sweep(trials, grid);
    const double theta = choose_threshold(report, ThresholdPolicy::TargetFrr, 0.25);
    CHECK(far_frr(trials, theta).frr <= 0.25);
    // half a step earlier the FRR must exceed the target
    CHECK(far_frr(trials, theta - 0.5).frr > 0.25);
  }
}

TEST_CASE("unlock_reduction multiplies detection ratio by pass rate") {
  CHECK(unlock_reduction(0.356, 0.076) == doctest::Approx(0.329).epsilon(0.002));
  CHECK(unlock_reduction(0.0, 0.5) == 0.0);
  CHECK(unlock_reduction(1.0, 0.0) == 1.0);
  CHECK_THROWS_AS(unlock_reduction(-0.1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(unlock_reduction(0.5, 1.5), std::invalid_argument);
}

TEST_CASE("subset_weights renormalizes sensor shares") {
  const auto& ids = sig::default_channel_ids();
  SUBCASE("acc only") {
    const WeightVector w = subset_weights(ids, "acc");
    for (int c = 0; c < 3; ++c) CHECK(w[c] == doctest::Approx(1.0 / 3.0));
    for (int c = 3; c < 6; ++c) CHECK(w[c] == 0.0);
  }
  SUBCASE("gyr only") {
    const WeightVector w = subset_weights(ids, "gyr");
    for (int c = 0; c < 3; ++c) CHECK(w[c] == 0.0);
    for (int c = 3; c < 6; ++c) CHECK(w[c] == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("acc+gyr equals the default split; all is an alias") {
    const WeightVector w = subset_weights(ids, "acc+gyr");
    const WeightVector all = subset_weights(ids, "all");
    const WeightVector expected = auth::sensor_split_weights();
    for (int c = 0; c < 6; ++c) {
      CHECK(w[c] == doctest::Approx(expected[c]));
      CHECK(all[c] == doctest::Approx(expected[c]));
    }
  }
  SUBCASE("unknown sensors and empty subsets are rejected") {
    CHECK_THROWS_AS(subset_weights(ids, "mag"), std::invalid_argument);
    CHECK_THROWS_AS(subset_weights(ids, ""), std::invalid_argument);
  }
}

TEST_CASE("TrialEngine builds leave-one-out genuine and cross-user impostor trials") {
  const auto signals = small_population(3, 4);
  TrialEngine engine = TrialEngine::from_signals(signals);
  CHECK(engine.user_count() == 3);

  const WeightVector w = auth::sensor_split_weights();
  const auto trials = engine.trials(w);

  std::size_t genuine = 0, impostor = 0;
  for (const auto& t : trials) (t.genuine ? genuine : impostor)++;
  CHECK(genuine == 3 * 4);       // one per held-out sample
  CHECK(impostor == 3 * 2 * 4);  // each user's template vs all foreign samples

  SUBCASE("genuine trials are tighter than impostor trials on average") {
    double gsum = 0, isum = 0;
    for (const auto& t : trials) (t.genuine ? gsum : isum) += t.distance;
    CHECK(gsum / genuine < isum / impostor);
  }
  SUBCASE("separation means reproduce the trial populations") {
    const auto sep = engine.separation(w);
    REQUIRE(sep.size() == 3);
    for (const auto& s : sep) CHECK(s.intra_mean < s.inter_mean);
  }
  SUBCASE("medoid minimizes the summed weighted distance") {
    const std::size_t m = engine.medoid(0, w);
    // brute-force check against all candidates
    double best = 1e300;
    std::size_t expected = 0;
    for (std::size_t i = 0; i < engine.sample_count(0); ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < engine.sample_count(0); ++j) {
        if (i == j) continue;
        sum += dtw::dtw_multi_weighted(engine.signal(0, i).signal, engine.signal(0, j).signal, w)
                   .distance;
      }
      if (sum < best) {
        best = sum;
        expected = i;
      }
    }
    CHECK(m == expected);
  }
}

TEST_CASE("attack_eval separates FAR per tier over a shared FRR curve") {
  const gen::GenParams params;
  const auto victim_model = gen::make_user(7000, params);
  const auto attacker_model = gen::make_user(7100, params);

  std::vector<sig::PickUpSignal> own;
  for (std::uint64_t r = 0; r < 5; ++r) own.push_back(sample_of(victim_model, 1, r, params));
  const WeightVector w = auth::sensor_split_weights();
  auth::Profile profile = auth::enroll("victim", own, w, 0.5);
  std::map<std::string, auth::Profile> victims{{"victim", profile}};

  std::vector<AttackSample> samples;
  for (std::uint64_t r = 0; r < 4; ++r) {
    auto s = own[r];
    samples.push_back(AttackSample{s, "victim", std::nullopt});
    const auto ra = gen::gen_attack(victim_model, attacker_model, gen::ScenarioKind::RA, 1,
                                    r, params);
    const auto ea = gen::gen_attack(victim_model, attacker_model, gen::ScenarioKind::EA, 1,
                                    r, params);
    auto ras = sig::extract_pickups(ra.trace, sig::ExtractParams{});
    auto eas = sig::extract_pickups(ea.trace, sig::ExtractParams{});
    REQUIRE(!ras.empty());
    REQUIRE(!eas.empty());
    samples.push_back(AttackSample{ras.front(), "victim", AttackKind::RA});
    samples.push_back(AttackSample{eas.front(), "victim", AttackKind::EA});
  }

  std::vector<double> grid;
  for (double t = 0.0; t <= 2.0; t += 0.02) grid.push_back(t);
  const AttackReport report = attack_eval(victims, samples, grid);

  CHECK(report.far.contains(AttackKind::RA));
  CHECK(report.far.contains(AttackKind::EA));
  CHECK(report.frr.front() == 1.0);  // theta 0 rejects every genuine sample...
  CHECK(report.frr.back() <= 0.25);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(report.far.at(AttackKind::EA)[i] >= report.far.at(AttackKind::RA)[i] - 1e-12);

  SUBCASE("degenerate sanity: the victim's own samples labeled EA reach FAR 1") {
    std::vector<AttackSample> mislabeled;
    for (const auto& s : own)
      mislabeled.push_back(AttackSample{s, "victim", AttackKind::EA});
    const AttackReport degenerate = attack_eval(victims, mislabeled, grid);
    CHECK(degenerate.far.at(AttackKind::EA).back() == 1.0);
  }
  SUBCASE("unknown victims are rejected") {
    std::vector<AttackSample> bad{AttackSample{own[0], "nobody", AttackKind::RA}};
    CHECK_THROWS_AS(attack_eval(victims, bad, grid), std::invalid_argument);
  }
  SUBCASE("unknown attack labels are rejected at parse time") {
    CHECK_THROWS_AS(attack_kind_from_string("XX"), std::invalid_argument);
    CHECK(attack_kind_from_string("RA") == AttackKind::RA);
  }
}

TEST_CASE("subset_ablation evaluates each subset at its own threshold") {
  const auto signals = small_population(3, 4);
  TrialEngine engine = TrialEngine::from_signals(signals);
  const auto results = subset_ablation(engine, {"all", "acc", "gyr", "acc+gyr"}, 60);
  REQUIRE(results.size() == 4);

  // "all" must match the main pipeline at the same grid resolution
  const auto trials = engine.trials(auth::sensor_split_weights(), "all");
  const auto grid = default_theta_grid(trials, 60);
  const EvalReport main_report = sweep(trials, grid);
  CHECK(results[0].chosen_theta == main_report.chosen_theta);
  CHECK(results[0].accuracy == accuracy(trials, main_report.chosen_theta));
  // acc+gyr is the same weighting as "all"
  CHECK(results[3].accuracy == results[0].accuracy);

  CHECK_THROWS_AS(subset_ablation(engine, {}, 60), std::invalid_argument);
}

TEST_CASE("weight_search scans the acc:gyr split") {
  gen::GenParams params;
  auto signals = small_population(3, 4, params);

  SUBCASE("pure-noise gyro pushes the best split to maximal acc weight") {
    // Per-signal noise scale: gyro distances become identity-free and noisy,
    // so any gyro weight strictly degrades accuracy.
    gen::GenParams hard = params;
    hard.intra_jitter = 0.3;
    auto noisy = small_population(4, 6, hard);
    Rng rng(999);
    for (auto& s : noisy) {
      const double sd = rng.uniform(0.2, 2.5);
      std::vector<Series> channels = s.signal.channels();
      for (int c = 3; c < 6; ++c) {
        std::vector<double> noise(s.signal.length());
        for (double& v : noise) v = rng.normal(0.0, sd);
        channels[c] = Series(noise);
      }
      s.signal = MultiSeries(std::move(channels), sig::default_channel_ids());
    }
    TrialEngine engine = TrialEngine::from_signals(noisy);
    const auto result = weight_search(engine, 0.1);
    CHECK(result.best_acc_share == doctest::Approx(0.9));
    CHECK(result.surface.size() == 9);
  }
  SUBCASE("grid step must divide the search range") {
    TrialEngine engine = TrialEngine::from_signals(signals);
    CHECK_THROWS_AS(weight_search(engine, 0.15), std::invalid_argument);
    CHECK_THROWS_AS(weight_search(engine, -0.1), std::invalid_argument);
  }
  SUBCASE("gyro mirroring acc makes the surface exactly symmetric") {
    for (auto& s : signals) {
      std::vector<Series> channels = s.signal.channels();
      for (int c = 0; c < 3; ++c) channels[c + 3] = channels[c];
      s.signal = MultiSeries(std::move(channels), sig::default_channel_ids());
    }
    TrialEngine engine = TrialEngine::from_signals(signals);
    const auto result = weight_search(engine, 0.1);
    REQUIRE(result.surface.size() == 9);
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(result.surface[i].second == doctest::Approx(result.surface[8 - i].second));
    CHECK(result.best_acc_share == doctest::Approx(0.5));
  }
}
