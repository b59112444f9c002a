#pragma once

// Generated by tests/oracles/derive_values.py. Do not edit by hand.

namespace rra::frozen {

inline constexpr double kEpsDExample = 0.48016139565996035;
inline constexpr double kLearningRateN4 = 1.1774100225154747;
inline constexpr double kAssumptionXi005 = 0.14978661367769955;
inline constexpr double kAssumptionXi1N8 = 2.0794415416798357;
inline constexpr double kTracePhi2 = 0.42693863711271784;
inline constexpr double kGapTLambdaS = 3.0;
inline constexpr double kGapTLambdaE = 4.0;
inline constexpr double kGapAlwaysK2Reward = 4.0;
inline constexpr double kGapAlwaysK1Reward = 3.0;
inline constexpr double kTruncatedGapDpPerStep = 0.875;
inline constexpr double kTruncatedGapLpEPerStep = 0.875;
inline constexpr double kLpSSlack = 1.0;
inline constexpr double kLpSBinding = 0.5;
inline constexpr double kTwoTypeLpRs = 0.5;
inline constexpr double kMnlExampleObjective = 0.5;
inline constexpr double kCatalogSize = 3473.0;

}  // namespace rra::frozen
