#pragma once

// Structural deadlock analysis: which methods can never take part in a cycle
// of future synchronizations, independently of the main block.

#include <set>
#include <string>
#include <vector>

#include "c2ao/model/model.hpp"

namespace c2ao::deadlock {

/// "Class.method".
using MethodId = std::string;

struct SyncEdge {
  MethodId from;
  MethodId to;
};

struct SyncGraph {
  std::vector<MethodId> nodes;
  std::vector<SyncEdge> edges;  // from syncs on a future of a call to `to`
  std::set<MethodId> has_sync;
  std::set<MethodId> takes_future_params;
};

SyncGraph build_sync_graph(const model::Model& model);

struct Classification {
  std::set<MethodId> free;
  std::set<MethodId> unknown;
};

/// Methods without await/get are free. A synchronizing method is free when
/// each future it waits on comes from a call in its own body either to a
/// method without synchronization on an object of a releasable class, or to
/// a method of an object created in that body from arguments that cannot
/// call back (no `this`, no futures, references only to objects whose
/// methods never synchronize). Methods that wait on a future parameter are
/// never free.
///
/// A class is releasable when each blocking get in its methods (one not
/// covered by an earlier await) waits on a fresh object or on a method
/// without synchronization of another releasable class: its objects are
/// never held forever, so calls queued on them eventually start.
Classification classify(const model::Model& model);

enum class Verdict { DeadlockFree, Unresolved };

struct FutureSource {
  MethodId caller;
  std::string argument;  // future variable passed at the call site
  std::string origin;    // "Class.method", "parameter p", or "unknown"
};

struct Justification {
  Verdict verdict = Verdict::Unresolved;
  std::set<MethodId> justified;                      // free plus methods shown safe
  std::vector<std::pair<MethodId, std::vector<FutureSource>>> sources;  // per unknown method
  std::set<MethodId> unresolved;
  std::string text;
};

/// Extends the free set by provenance of future parameters: an unknown
/// method is safe when everything it waits on comes from safe calls or fresh
/// objects and, at every call site in the model (main block included), each
/// future passed to it is the future of a call to a safe method.
Justification justify(const model::Model& model, const Classification& c);

const char* to_string(Verdict v);

}  // namespace c2ao::deadlock
