#include <doctest.h>

#include "qemlab/error.hpp"
#include "qemlab/prob_dist.hpp"

using namespace qem;

TEST_CASE("uniform and delta are valid distributions") {
  CHECK(ProbDist::uniform().valid());
  CHECK(ProbDist::delta(0).valid());
  CHECK(ProbDist::delta(31).valid());
  CHECK(ProbDist::uniform().sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("validity rejects negatives and bad sums") {
  ProbDist p = ProbDist::uniform();
  p[0] -= 2.0 / kDim;
  p[1] += 2.0 / kDim;
  CHECK_FALSE(p.valid());  // negative entry
  ProbDist q = ProbDist::uniform();
  q[0] += 1e-6;
  CHECK_FALSE(q.valid());  // sum off by more than 1e-9
}

TEST_CASE("renormalize scales to unit mass and rejects the zero vector") {
  ProbDist p;
  p[3] = 2.0;
  p[7] = 2.0;
  p.renormalize();
  CHECK(p[3] == doctest::Approx(0.5));
  CHECK(p.valid());
  ProbDist z;
  CHECK_THROWS_AS(z.renormalize(), ValidationError);
}

TEST_CASE("l1 distance") {
  CHECK(l1_distance(ProbDist::delta(0), ProbDist::delta(1)) == doctest::Approx(2.0));
  CHECK(l1_distance(ProbDist::uniform(), ProbDist::uniform()) == 0.0);
}
