#pragma once

// Generated by tools/gen_mackinnon_table.py. Do not edit by hand.
//
// Asymptotic p-values of the Dickey-Fuller tau statistic for the
// constant-only regression (one integrated series), tabulated on a
// 0.05 grid. Rows are (statistic, p_value), ascending in both columns.

#include <array>

namespace fcsel::detail {

struct TauPoint {
    double statistic;
    double p_value;
};

inline constexpr std::array<TauPoint, 176> kTauConstantTable{{
    {-6.00, 1.6661204834e-07},
    {-5.95, 2.1584837749e-07},
    {-5.90, 2.7925780060e-07},
    {-5.85, 3.6079841699e-07},
    {-5.80, 4.6549534731e-07},
    {-5.75, 5.9971661836e-07},
    {-5.70, 7.7151687491e-07},
    {-5.65, 9.9106458145e-07},
    {-5.60, 1.2711717107e-06},
    {-5.55, 1.6279488832e-06},
    {-5.50, 2.0816136210e-06},
    {-5.45, 2.6574849247e-06},
    {-5.40, 3.3872038899e-06},
    {-5.35, 4.3102276843e-06},
    {-5.30, 5.4756530432e-06},
    {-5.25, 6.9444356593e-06},
    {-5.20, 8.7920835785e-06},
    {-5.15, 1.1111916124e-05},
    {-5.10, 1.4018995082e-05},
    {-5.05, 1.7654852013e-05},
    {-5.00, 2.2193154714e-05},
    {-4.95, 2.7846477073e-05},
    {-4.90, 3.4874359862e-05},
    {-4.85, 4.3592875337e-05},
    {-4.80, 5.4385935695e-05},
    {-4.75, 6.7718614210e-05},
    {-4.70, 8.4152777878e-05},
    {-4.65, 1.0436536104e-04},
    {-4.60, 1.2916964005e-04},
    {-4.55, 1.5953989856e-04},
    {-4.50, 1.9663990034e-04},
    {-4.45, 2.4185561029e-04},
    {-4.40, 2.9683262235e-04},
    {-4.35, 3.6351876401e-04},
    {-4.30, 4.4421234795e-04},
    {-4.25, 5.4161653007e-04},
    {-4.20, 6.5890020605e-04},
    {-4.15, 7.9976583352e-04},
    {-4.10, 9.6852449931e-04},
    {-4.05, 1.1701784588e-03},
    {-4.00, 1.4105112530e-03},
    {-3.95, 1.6961853545e-03},
    {-3.90, 2.0348471063e-03},
    {-3.85, 2.4352384899e-03},
    {-3.80, 2.9073149933e-03},
    {-3.75, 3.4623685457e-03},
    {-3.70, 4.1131541388e-03},
    {-3.65, 4.8740183728e-03},
    {-3.60, 5.7610277513e-03},
    {-3.55, 6.7920941045e-03},
    {-3.50, 7.9870940615e-03},
    {-3.45, 9.3679790205e-03},
    {-3.40, 1.0958871608e-02},
    {-3.35, 1.2786144178e-02},
    {-3.30, 1.4878474492e-02},
    {-3.25, 1.7266873423e-02},
    {-3.20, 1.9984679219e-02},
    {-3.15, 2.3067512798e-02},
    {-3.10, 2.6553188484e-02},
    {-3.05, 3.0481574802e-02},
    {-3.00, 3.4894400275e-02},
    {-2.95, 3.9834999742e-02},
    {-2.90, 4.5347997472e-02},
    {-2.85, 5.1478924406e-02},
    {-2.80, 5.8273768069e-02},
    {-2.75, 6.5778455224e-02},
    {-2.70, 7.4038269040e-02},
    {-2.65, 8.3097204445e-02},
    {-2.60, 9.2997267439e-02},
    {-2.55, 1.0377772628e-01},
    {-2.50, 1.1547432476e-01},
    {-2.45, 1.2811846990e-01},
    {-2.40, 1.4173640869e-01},
    {-2.35, 1.5634841023e-01},
    {-2.30, 1.7196797152e-01},
    {-2.25, 1.8860106622e-01},
    {-2.20, 2.0624545685e-01},
    {-2.15, 2.2489009094e-01},
    {-2.10, 2.4451460150e-01},
    {-2.05, 2.6508893137e-01},
    {-2.00, 2.8657309917e-01},
    {-1.95, 3.0891712246e-01},
    {-1.90, 3.3206111072e-01},
    {-1.85, 3.5593553705e-01},
    {-1.80, 3.8046169361e-01},
    {-1.75, 4.0555233097e-01},
    {-1.70, 4.3111247687e-01},
    {-1.65, 4.5704042476e-01},
    {-1.60, 4.8359346965e-01},
    {-1.55, 5.0864819611e-01},
    {-1.50, 5.3351133891e-01},
    {-1.45, 5.5808490224e-01},
    {-1.40, 5.8227611852e-01},
    {-1.35, 6.0599842955e-01},
    {-1.30, 6.2917231368e-01},
    {-1.25, 6.5172594952e-01},
    {-1.20, 6.7359571193e-01},
    {-1.15, 6.9472650048e-01},
    {-1.10, 7.1507190516e-01},
    {-1.05, 7.3459421785e-01},
    {-1.00, 7.5326430120e-01},
    {-0.95, 7.7106132951e-01},
    {-0.90, 7.8797241767e-01},
    {-0.85, 8.0399215578e-01},
    {-0.80, 8.1912206764e-01},
    {-0.75, 8.3337001107e-01},
    {-0.70, 8.4674953789e-01},
    {-0.65, 8.5927922996e-01},
    {-0.60, 8.7098202687e-01},
    {-0.55, 8.8188455878e-01},
    {-0.50, 8.9201649658e-01},
    {-0.45, 9.0140992935e-01},
    {-0.40, 9.1009877736e-01},
    {-0.35, 9.1811824703e-01},
    {-0.30, 9.2550433221e-01},
    {-0.25, 9.3229336503e-01},
    {-0.20, 9.3852161743e-01},
    {-0.15, 9.4422495378e-01},
    {-0.10, 9.4943853350e-01},
    {-0.05, 9.5419656180e-01},
    {0.00, 9.5853208606e-01},
    {0.05, 9.6247683456e-01},
    {0.10, 9.6606109408e-01},
    {0.15, 9.6931362274e-01},
    {0.20, 9.7226159393e-01},
    {0.25, 9.7493056783e-01},
    {0.30, 9.7734448639e-01},
    {0.35, 9.7952568849e-01},
    {0.40, 9.8149494162e-01},
    {0.45, 9.8327148716e-01},
    {0.50, 9.8487309631e-01},
    {0.55, 9.8631613406e-01},
    {0.60, 9.8761562917e-01},
    {0.65, 9.8878534781e-01},
    {0.70, 9.8983786960e-01},
    {0.75, 9.9078466429e-01},
    {0.80, 9.9163616803e-01},
    {0.85, 9.9240185823e-01},
    {0.90, 9.9309032633e-01},
    {0.95, 9.9370934773e-01},
    {1.00, 9.9426594855e-01},
    {1.05, 9.9476646893e-01},
    {1.10, 9.9521662256e-01},
    {1.15, 9.9562155252e-01},
    {1.20, 9.9598588316e-01},
    {1.25, 9.9631376835e-01},
    {1.30, 9.9660893594e-01},
    {1.35, 9.9687472872e-01},
    {1.40, 9.9711414191e-01},
    {1.45, 9.9732985748e-01},
    {1.50, 9.9752427541e-01},
    {1.55, 9.9769954202e-01},
    {1.60, 9.9785757578e-01},
    {1.65, 9.9800009056e-01},
    {1.70, 9.9812861661e-01},
    {1.75, 9.9824451949e-01},
    {1.80, 9.9834901705e-01},
    {1.85, 9.9844319468e-01},
    {1.90, 9.9852801893e-01},
    {1.95, 9.9860434973e-01},
    {2.00, 9.9867295120e-01},
    {2.05, 9.9873450134e-01},
    {2.10, 9.9878960061e-01},
    {2.15, 9.9883877945e-01},
    {2.20, 9.9888250502e-01},
    {2.25, 9.9892118702e-01},
    {2.30, 9.9895518284e-01},
    {2.35, 9.9898480192e-01},
    {2.40, 9.9901030962e-01},
    {2.45, 9.9903193041e-01},
    {2.50, 9.9904985053e-01},
    {2.55, 9.9906422018e-01},
    {2.60, 9.9907515515e-01},
    {2.65, 9.9908273811e-01},
    {2.70, 9.9908701926e-01},
    {2.74, 9.9908808010e-01},
}};

}  // namespace fcsel::detail
