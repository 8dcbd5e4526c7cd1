#ifndef TRICOIN_ANALYTIC_HPP
#define TRICOIN_ANALYTIC_HPP

namespace tricoin
{

/// Rotation class of the fully inelastic toss.
enum class AnalyticModel
{
  Flat,        // tumbling about a single diameter
  Volumetric,  // orientation uniform over the sphere
};

/**
 * @brief Side-landing probability for planar tumbling with no bounce.
 *
 * The coin's cross-section is inscribed in a circle; the side wins when the
 * axis ends within the side sector of half-width arctan(H / 2R).
 *
 * @param ratio aspect ratio H / R, finite and >= 0
 * @throws std::invalid_argument for negative or non-finite ratio
 */
double flat_probability(double ratio);

/**
 * @brief Side-landing probability for a uniformly random orientation with no bounce.
 *
 * Fraction of the circumscribed sphere covered by the projection of the
 * lateral surface: ratio / sqrt(ratio^2 + 4).
 */
double volumetric_probability(double ratio);

double probability(AnalyticModel model, double ratio);

/// Aspect ratio at which the model gives exactly 1/3.
double fair_ratio(AnalyticModel model);

}  // namespace tricoin

#endif  // TRICOIN_ANALYTIC_HPP
