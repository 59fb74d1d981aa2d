#pragma once

#include <string>

#include "appsim/spec.hpp"
#include "appsim/spec_io.hpp"

namespace fixtures {

// Microwave-style appliance touching every mechanism kind: magnet-held door,
// spring-back buttons, press trigger, countdown knob, screen, touch pad,
// lamp, logo, turntable motor, latchable lever.
inline std::string micro_json() {
  return R"JSON({
  "id": "microwave_test",
  "category": "microwave_oven",
  "panel": {"width": 800, "height": 600},
  "parts": [
    {
      "name": "door",
      "joint": {"kind": "revolute", "limits": [0, 90], "rest": 0},
      "panel_rect": [40, 60, 430, 540],
      "state_labels": {"0": "closed", "90": "open"},
      "mechanisms": [
        {"kind": "magnetic_attraction",
         "hold": [{"param": "run_state", "op": "==", "value": "cooking"}]}
      ]
    },
    {
      "name": "door_button",
      "joint": {"kind": "prismatic", "limits": [0, 2], "rest": 0},
      "panel_rect": [460, 480, 540, 540],
      "state_labels": {"0": "released", "2": "pressed"},
      "mechanisms": [
        {"kind": "inner_spring", "return_ticks": 1},
        {"kind": "mechanical_trigger", "on": {"press": "door_button"}, "target": "door",
         "effect": {"set": "part_state", "name": "door", "value": "open"},
         "guard": [{"param": "run_state", "op": "==", "value": "idle"}]}
      ]
    },
    {
      "name": "start_button",
      "joint": {"kind": "prismatic", "limits": [0, 2], "rest": 0},
      "panel_rect": [460, 400, 540, 460],
      "state_labels": {"0": "released", "2": "pressed"},
      "mechanisms": [
        {"kind": "inner_spring", "return_ticks": 1},
        {"kind": "safety_lock",
         "unlocked_when": [{"part": "door", "op": "==", "value": "closed"}],
         "blocks": ["Press"]}
      ]
    },
    {
      "name": "timer_knob",
      "joint": {"kind": "revolute", "limits": [0, 108], "rest": 0, "detents": [0, 36, 72, 108]},
      "panel_rect": [560, 300, 660, 400],
      "state_labels": {"0": "0", "36": "1", "72": "2", "108": "3"},
      "mechanisms": [
        {"kind": "knob_countdown", "ticks_per_detent": 10, "on_zero": []}
      ]
    },
    {
      "name": "screen",
      "joint": {"kind": "fixed"},
      "panel_rect": [560, 60, 760, 140],
      "state_labels": {},
      "mechanisms": [
        {"kind": "screen_display", "fields": ["time_left"], "format": "{value} {unit}"}
      ]
    },
    {
      "name": "power_pad",
      "joint": {"kind": "fixed"},
      "panel_rect": [560, 160, 660, 220],
      "state_labels": {},
      "mechanisms": [
        {"kind": "touch_sensing",
         "effects": [{"set": "parameter", "name": "power_level", "value": "high"}]}
      ]
    },
    {
      "name": "lamp",
      "joint": {"kind": "fixed"},
      "panel_rect": [40, 20, 120, 50],
      "state_labels": {},
      "mechanisms": [
        {"kind": "illumination",
         "on_when": [{"param": "run_state", "op": "==", "value": "cooking"}]}
      ]
    },
    {
      "name": "logo_badge",
      "joint": {"kind": "fixed"},
      "panel_rect": [700, 20, 780, 50],
      "state_labels": {},
      "mechanisms": [
        {"kind": "logo_indicator", "mode_when": [
          {"when": [{"param": "run_state", "op": "==", "value": "cooking"}], "mode": "on"},
          {"when": [{"part": "door", "op": "==", "value": "open"}], "mode": "flash"}
        ]}
      ]
    },
    {
      "name": "turntable",
      "joint": {"kind": "revolute", "limits": [0, 360], "rest": 0},
      "panel_rect": [100, 560, 400, 590],
      "state_labels": {},
      "mechanisms": [
        {"kind": "rotary_motor", "joint": "turntable", "rate": 2,
         "on_when": [{"param": "run_state", "op": "==", "value": "cooking"}]}
      ]
    },
    {
      "name": "lever",
      "joint": {"kind": "prismatic", "limits": [0, 6], "rest": 6},
      "panel_rect": [680, 450, 720, 560],
      "state_labels": {"0": "down", "6": "up"},
      "mechanisms": [
        {"kind": "inner_spring", "return_ticks": 3, "latch_param": "lever_latch"}
      ]
    }
  ],
  "parameters": [
    {"name": "run_state", "domain": {"labels": ["idle", "cooking"]}, "initial": "idle"},
    {"name": "time_left", "domain": {"min": 0, "max": 3, "step": 1}, "initial": 0,
     "unit": "min"},
    {"name": "power_level", "domain": {"labels": ["low", "high"]}, "initial": "low"},
    {"name": "lever_latch", "domain": {"min": 0, "max": 1}, "initial": 0}
  ],
  "rules": [
    {"id": "sync_time_0", "priority": 5,
     "when": [{"part": "timer_knob", "op": "==", "value": "0"}],
     "then": [{"set": "parameter", "name": "time_left", "value": 0}]},
    {"id": "sync_time_1", "priority": 5,
     "when": [{"part": "timer_knob", "op": "==", "value": "1"}],
     "then": [{"set": "parameter", "name": "time_left", "value": 1}]},
    {"id": "sync_time_2", "priority": 5,
     "when": [{"part": "timer_knob", "op": "==", "value": "2"}],
     "then": [{"set": "parameter", "name": "time_left", "value": 2}]},
    {"id": "sync_time_3", "priority": 5,
     "when": [{"part": "timer_knob", "op": "==", "value": "3"}],
     "then": [{"set": "parameter", "name": "time_left", "value": 3}]},
    {"id": "door_open_stops", "priority": 2,
     "when": [{"part": "door", "op": "==", "value": "open"}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]},
    {"id": "timeout_stops", "priority": 2,
     "when": [{"param": "time_left", "op": "==", "value": 0}],
     "then": [{"set": "parameter", "name": "run_state", "value": "idle"}]},
    {"id": "start_cooking", "priority": 1,
     "when": [{"part": "start_button", "op": "==", "value": "pressed"},
              {"part": "door", "op": "==", "value": "closed"},
              {"param": "time_left", "op": ">", "value": 0}],
     "then": [{"set": "parameter", "name": "run_state", "value": "cooking"}]}
  ],
  "objects": ["mug"]
})JSON";
}

inline appsim::ApplianceSpec micro_spec() {
  return appsim::load_spec(micro_json(), "micro");
}

// Two-state flip switch wired to a lamp. Smallest useful dynamics: two nodes.
inline std::string toggle_json() {
  return R"JSON({
  "id": "toggle_test",
  "category": "kettle",
  "panel": {"width": 200, "height": 100},
  "parts": [
    {
      "name": "switch",
      "joint": {"kind": "revolute", "limits": [0, 30], "rest": 0},
      "panel_rect": [20, 20, 60, 80],
      "state_labels": {"0": "off", "30": "on"},
      "mechanisms": []
    },
    {
      "name": "lamp",
      "joint": {"kind": "fixed"},
      "panel_rect": [100, 30, 140, 70],
      "state_labels": {},
      "mechanisms": [
        {"kind": "illumination", "on_when": [{"part": "switch", "op": "==", "value": "on"}]}
      ]
    }
  ],
  "parameters": [],
  "rules": [],
  "objects": []
})JSON";
}

inline appsim::ApplianceSpec toggle_spec() {
  return appsim::load_spec(toggle_json(), "toggle");
}

}  // namespace fixtures
