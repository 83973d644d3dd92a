#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "posverif/bytes.hpp"
#include "posverif/spacetime/rational.hpp"

namespace posverif::spacetime {

using PartyId = std::uint32_t;

struct Broadcast {
    bool operator==(const Broadcast&) const = default;
};
struct Directed {
    PartyId target;
    bool operator==(const Directed&) const = default;
};
using Mode = std::variant<Broadcast, Directed>;

struct Public {
    bool operator==(const Public&) const = default;
};
struct Private {
    std::set<PartyId> members;
    bool operator==(const Private&) const = default;
};
using Channel = std::variant<Public, Private>;

/// What a handler hands back to the simulator. Sender, time and position are
/// filled in from the handler's context.
struct Emission {
    std::string label;
    Bytes payload;
    Mode mode = Broadcast{};
    Channel channel = Public{};
};

struct Message {
    std::string label;
    Bytes payload;
    PartyId sender = 0;
    Coordinate emit_time;
    Coordinate emit_pos;
    Mode mode = Broadcast{};
    Channel channel = Public{};

    /// emit_time + |at - emit_pos|
    Coordinate arrival_at(const Coordinate& at) const { return emit_time + abs(at - emit_pos); }
};

class Simulation;

/// Handle given to behaviors while one of their handlers runs.
class PartyContext {
public:
    PartyId id() const noexcept { return id_; }
    const Coordinate& now() const noexcept { return now_; }
    const Coordinate& position() const noexcept;
    void emit(Emission e);
    /// Schedules an on_alarm call for this party at `at` (must not be in the past).
    void set_alarm(const Coordinate& at, std::uint64_t tag = 0);

private:
    friend class Simulation;
    PartyContext(Simulation& sim, PartyId id, Coordinate now) : sim_(sim), id_(id), now_(std::move(now)) {}
    Simulation& sim_;
    PartyId id_;
    Coordinate now_;
};

class PartyBehavior {
public:
    virtual ~PartyBehavior() = default;
    virtual void on_receive(PartyContext& ctx, const Message& msg) = 0;
    virtual void on_alarm(PartyContext& ctx, std::uint64_t tag) {
        (void)ctx;
        (void)tag;
    }
};

enum class EventKind { Emit, Deliver, Alarm };
const char* event_kind_name(EventKind k) noexcept;

struct TraceEvent {
    Coordinate time;
    EventKind kind;
    PartyId party;
    std::string party_name;
    std::string label;
    Bytes payload;
    std::string digest;
};

struct Trace {
    std::vector<TraceEvent> events;

    /// One JSON object per line: time, kind, party, label, digest.
    std::string to_jsonl() const;
    /// Deliveries of `label` to `party`, in trace order.
    std::vector<const TraceEvent*> deliveries(PartyId party, const std::string& label) const;
};

class Simulation {
public:
    Simulation() = default;
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    PartyId add_party(std::string name, Coordinate position, std::shared_ptr<PartyBehavior> behavior);
    /// Alarms may be scheduled before run() or from within handlers.
    void schedule_alarm(PartyId party, const Coordinate& at, std::uint64_t tag = 0);
    /// Injects an emission from `party` at time `at` (used to start protocols).
    void schedule_emission(PartyId party, const Coordinate& at, Emission e);

    /// Processes all events with time <= until. Can be called once.
    Trace run(const Coordinate& until);

    std::size_t party_count() const noexcept { return parties_.size(); }
    const std::string& party_name(PartyId id) const;
    const Coordinate& party_position(PartyId id) const;
    PartyBehavior& behavior(PartyId id) const;

private:
    friend class PartyContext;

    struct Party {
        std::string name;
        Coordinate position;
        std::shared_ptr<PartyBehavior> behavior;
    };
    struct Event {
        Coordinate time;
        std::uint64_t seq;
        EventKind kind;
        PartyId party;
        std::size_t message;  // index into messages_ for Emit/Deliver
        std::uint64_t tag;    // alarm tag
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    void check_party(PartyId id) const;
    void push(Event e);
    void emit_now(PartyId sender, const Coordinate& now, Emission e);

    std::vector<Party> parties_;
    std::vector<Message> messages_;
    std::vector<Event> queue_;  // heap ordered by Later
    std::uint64_t seq_ = 0;
    bool started_ = false;
    Trace trace_;
};

/// Time window predicates decided with exact comparison.
struct Deadline {
    enum class Kind { Before, AtMost, Exactly, AtLeast };
    Kind kind;
    Coordinate bound;

    static Deadline before(Coordinate t) { return {Kind::Before, t}; }
    static Deadline at_most(Coordinate t) { return {Kind::AtMost, t}; }
    static Deadline exactly(Coordinate t) { return {Kind::Exactly, t}; }
    static Deadline at_least(Coordinate t) { return {Kind::AtLeast, t}; }
    bool admits(const Coordinate& t) const;
};

/// True iff some delivery to `party` matches `predicate(payload, time)`.
bool assert_deadline(const Trace& trace, PartyId party,
                     const std::function<bool(const Bytes&, const Coordinate&)>& predicate);
/// True iff the first delivery of `label` to `party` exists and meets `deadline`.
bool assert_deadline(const Trace& trace, PartyId party, const std::string& label, const Deadline& deadline);

}  // namespace posverif::spacetime
