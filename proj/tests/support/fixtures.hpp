#pragma once
// Minimax designs from an interior-point conic solver (tolerance 1e-12) on
// the default 512-point grid over [0, pi/2].

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fixtures {

struct MinimaxFixture {
  std::int64_t p;
  std::int64_t q;
  std::size_t order;
  double objective;
  std::vector<double> taps;
};

inline const std::vector<MinimaxFixture> kMinimax = {
    {147, 160, 1, 0.095752373749731057, {1.0595738505011103, -0.05957385050111029}},
    {147, 160, 2, 0.029743074078026052, {1.0759804955823118, -0.13052910637654896, 0.054548610794236639}},
    {147, 160, 3, 0.021231744685676048,
     {1.1032548637914052, -0.17096201701243655, 0.096375055788191388, -0.028667902567156005}},
    {147, 160, 4, 0.0098520941306909915,
     {1.1207588195512659, -0.22194717582187168, 0.15789028805577504, -0.084850757090330783,
      0.028148825305161797}},
    {147, 160, 5, 0.0069882518872984509,
     {1.1384653804590845, -0.26644594778585218, 0.22550860901966915, -0.15286001592843426,
      0.073968462297196391, -0.018636488061663601}},
    {160, 147, 1, 0.091099805692729713, {0.92594967175271359, 0.074050328247286398}},
    {160, 147, 2, 0.026253317844238542, {0.91168209602921024, 0.14085855131016831, -0.052540647339387167}},
    {160, 147, 3, 0.017967143354637553,
     {0.88659721171488481, 0.17782007866708829, -0.091065060887474861, 0.026647770505501742}},
    {160, 147, 4, 0.0080461527334085257,
     {0.87173675041971588, 0.22134601050929403, -0.14359761970943366, 0.074856601213548243,
      -0.024341742433124612}},
    {160, 147, 5, 0.0055556678535203761,
     {0.85694367982421626, 0.25851287199681189, -0.20023905325993038, 0.1318933124846231,
      -0.06288732071475632, 0.015776509669031387}},
};

}  // namespace fixtures
