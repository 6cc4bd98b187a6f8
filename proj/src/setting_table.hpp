// Generator constants for the simulation settings, transcribed as printed.
#ifndef NOSE_SETTING_TABLE_HPP
#define NOSE_SETTING_TABLE_HPP

#include <array>

namespace nose::table {

inline constexpr std::array<long, 7> kEqualSpaced = {50, 100, 150, 200, 250, 300, 350};

// S1, MS1, MS2
inline constexpr long kS1Length = 400;
inline constexpr std::array<double, 8> kS1Means = {0, 1.5, 3, 1.5, 3, 0.5, 2, 0};
inline constexpr double kS1Variance = 2.0;

// S2
inline constexpr long kS2Length = 916;
inline constexpr std::array<long, 11> kS2Changes = {81, 134, 178, 267, 346, 413, 528, 577, 636, 741, 822};
inline constexpr std::array<double, 12> kS2Means = {0,     1.23,  -0.248, 0.861, -0.534, 1.057,
                                                    0.369, 1.331, 0.483,  1.105, -1.101, 0};

// S3
inline constexpr long kS3Length = 400;
inline constexpr std::array<double, 8> kS3Rates = {1, 0.25, 2, 1, 3, 1.5, 2.5, 1};

// S4
inline constexpr long kS4Length = 756;
inline constexpr std::array<long, 7> kS4Changes = {150, 250, 300, 450, 550, 650, 700};
inline constexpr std::array<double, 8> kS4Sds = {1, 1.68, 0.57, 0.20, 2.18, 3.09, 1.83, 1};
inline constexpr std::array<double, 8> kS4Means = {0.056, 0.047, -0.034, -0.017, 0.032, 0.068, -0.042, 0.017};

// S5; the intercept is not printed and is taken as 0.
inline constexpr long kS5Length = 450;
inline constexpr std::array<long, 5> kS5Changes = {50, 100, 200, 300, 400};
inline constexpr std::array<double, 6> kS5Phi = {0.5, -0.5, 0.65, -0.25, -0.85, 0.45};
inline constexpr double kS5Intercept = 0.0;

// S6
inline constexpr long kS6States = 240;
inline constexpr int kS6Replicates = 2;
inline constexpr std::array<long, 5> kS6Changes = {40, 80, 120, 160, 200};
inline constexpr std::array<double, 6> kS6Coefficients = {1, -1, 0.5, -0.5, 1, -1};
inline constexpr double kS6Intercept = 0.5;
inline constexpr double kS6CovariateBound = 2.0;

// MS2 noise recursion
inline constexpr double kMS2NoiseAr = 0.5;

// MS3: first- and second-order coefficients per segment. The third segment's
// duplicated lag is read as y_{t-2}.
inline constexpr long kMS3Length = 450;
inline constexpr std::array<long, 5> kMS3Changes = {50, 100, 200, 300, 400};
inline constexpr std::array<double, 6> kMS3Lag1 = {0.5, -0.5, 0.65, -0.25, -0.85, 0.45};
inline constexpr std::array<double, 6> kMS3Lag2 = {0, 0, 0.35, 0, -0.35, 0};

// DRAIP_SIM: segment sample means and sample SDs from the fitted partition.
inline constexpr long kDraipLength = 756;
inline constexpr std::array<long, 7> kDraipChanges = {37, 137, 206, 336, 426, 510, 630};
inline constexpr std::array<double, 8> kDraipMeans = {0.141, 0.124, 0.399, 0.214, -0.112, -0.093, -0.053, 0.116};
inline constexpr std::array<double, 8> kDraipSds = {1.173, 1.369, 1.873, 3.500, 2.570, 5.863, 2.426, 1.599};

}  // namespace nose::table

#endif  // NOSE_SETTING_TABLE_HPP
