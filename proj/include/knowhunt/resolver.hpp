// Decision aggregation: weigh evidence-agent against evidence-patient
// strength sums (or the two COPA alternatives), with ties and empty
// evidence abstaining, plus the optional seeded random back-off.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "knowhunt/evidence.hpp"

namespace knowhunt {

enum class Decision : std::uint8_t { Agent, Patient, Alt1, Alt2, Abstain };

inline const char* decision_name(Decision d) {
  switch (d) {
    case Decision::Agent: return "agent";
    case Decision::Patient: return "patient";
    case Decision::Alt1: return "alt1";
    case Decision::Alt2: return "alt2";
    case Decision::Abstain: return "abstain";
  }
  return "?";
}

struct Resolution {
  std::string instance_id;
  Decision decision = Decision::Abstain;
  int agent_strength = 0;    // alt1 strength for COPA
  int patient_strength = 0;  // alt2 strength for COPA
  std::size_t evidence_count = 0;
  bool answered = false;
};

inline Resolution decide_wsc(const std::vector<EvidenceSentence>& evidence) {
  Resolution r;
  for (const auto& e : evidence) {
    ++r.evidence_count;
    if (e.label == EvidenceLabel::EA) r.agent_strength += e.strength;
    else if (e.label == EvidenceLabel::EP) r.patient_strength += e.strength;
  }
  if (r.agent_strength > r.patient_strength) r.decision = Decision::Agent;
  else if (r.patient_strength > r.agent_strength) r.decision = Decision::Patient;
  else r.decision = Decision::Abstain;
  r.answered = r.decision != Decision::Abstain;
  return r;
}

enum class CopaRelation : std::uint8_t { Cause, Result };

inline Resolution decide_copa(const std::vector<EvidenceSentence>& evidence_alt1,
                              const std::vector<EvidenceSentence>& evidence_alt2) {
  Resolution r;
  auto total = [&](const std::vector<EvidenceSentence>& ev) {
    int sum = 0;
    for (const auto& e : ev) {
      ++r.evidence_count;
      if (e.label != EvidenceLabel::Insufficient) sum += e.strength;
    }
    return sum;
  };
  r.agent_strength = total(evidence_alt1);
  r.patient_strength = total(evidence_alt2);
  if (r.agent_strength > r.patient_strength) r.decision = Decision::Alt1;
  else if (r.patient_strength > r.agent_strength) r.decision = Decision::Alt2;
  else r.decision = Decision::Abstain;
  r.answered = r.decision != Decision::Abstain;
  return r;
}

// Replace an abstention by a coin flip that is reproducible for a given
// seed. The generator's raw low bit is used directly because the standard
// distributions are not bit-identical across implementations.
inline Resolution backoff_random(Resolution r, std::uint64_t seed, bool copa = false) {
  if (r.decision != Decision::Abstain) return r;
  std::mt19937_64 engine(seed);
  bool first = (engine() & 1u) == 0;
  if (copa) r.decision = first ? Decision::Alt1 : Decision::Alt2;
  else r.decision = first ? Decision::Agent : Decision::Patient;
  r.answered = true;
  return r;
}

}  // namespace knowhunt
