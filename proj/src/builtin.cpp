#include "scenario.hpp"

namespace contdef {

// Sixteen-quadcopter collective takeoff: four tetrahedron leaders, nine
// interior followers, three boundary followers mirrored by auxiliary nodes.
// The plan contracts the pinned stretch to one half while rotating the yaw
// angle a quarter turn and displacing the team by (100, 165, 200) m.
const std::string& builtin_table2_scenario() {
  static const std::string text = R"json({
  "name": "tetra16-takeoff",
  "n": 3,
  "seed": 0,
  "agents": [
    {"id": 1,  "role": "leader",   "position": [-30.0, -40.0, 0.0]},
    {"id": 2,  "role": "leader",   "position": [-30.0, 40.0, 0.0]},
    {"id": 3,  "role": "leader",   "position": [50.0, 0.0, 0.0]},
    {"id": 4,  "role": "leader",   "position": [0.0, 0.0, 60.0]},
    {"id": 5,  "role": "follower", "position": [-19.07, -18.70, 8.99]},
    {"id": 6,  "role": "follower", "position": [-19.43, 17.65, 5.16]},
    {"id": 7,  "role": "follower", "position": [25.05, -1.25, 10.56]},
    {"id": 8,  "role": "follower", "position": [1.06, -4.30, 36.01]},
    {"id": 9,  "role": "follower", "position": [-6.03, -5.54, 12.77]},
    {"id": 10, "role": "follower", "position": [-6.35, 1.94, 11.17]},
    {"id": 11, "role": "follower", "position": [-1.17, 2.65, 10.80]},
    {"id": 12, "role": "follower", "position": [0.39, -5.87, 16.54]},
    {"id": 13, "role": "follower", "position": [-2.55, -2.54, 13.56]},
    {"id": 14, "role": "follower", "position": [25.0, 40.0, 30.0]},
    {"id": 15, "role": "follower", "position": [25.0, -40.0, 30.0]},
    {"id": 16, "role": "follower", "position": [-55.0, 0.0, 30.0]},
    {"id": 17, "role": "aux",      "position": [25.0, 40.0, 30.0]},
    {"id": 18, "role": "aux",      "position": [25.0, -40.0, 30.0]},
    {"id": 19, "role": "aux",      "position": [-55.0, 0.0, 30.0]}
  ],
  "comm_graph": {
    "5":  [1, 6, 8, 9],
    "6":  [2, 5, 10, 11],
    "7":  [3, 8, 11, 12],
    "8":  [4, 5, 7, 12],
    "9":  [5, 10, 12, 13],
    "10": [6, 9, 11, 13],
    "11": [6, 10, 7, 13],
    "12": [7, 8, 5, 13],
    "13": [9, 10, 11, 12],
    "14": [1, 2, 3, 4],
    "15": [1, 2, 3, 4],
    "16": [1, 2, 3, 4],
    "17": [1, 2, 3, 4],
    "18": [1, 2, 3, 4],
    "19": [1, 2, 3, 4]
  },
  "safety": {"epsilon": 0.5, "mode": "relaxed", "stretch_floor": 0.5},
  "plan": {
    "mode": "of",
    "duration": 250.0,
    "end_features": {
      "stretch": [0.5, 1.0, 1.0],
      "rotation": [0.0, 0.0713, 1.5707963267948966],
      "offset": [100.0, 165.0, 200.0]
    }
  },
  "timing": {"dt": 0.005, "output_stride": 20}
}
)json";
  return text;
}

}  // namespace contdef
