/*
 * Copyright 2026 The ofhsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ofhsim/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

namespace ofhsim {

namespace {

std::string fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::string pct(std::uint64_t part, std::uint64_t whole)
{
    return whole == 0 ? "0.00" : fixed(100.0 * static_cast<double>(part) / static_cast<double>(whole), 2);
}

class row_sink
{
public:
    explicit row_sink(std::vector<report_row>& rows) : rows_(rows) {}

    template <typename T>
    void add(const std::string& entity, const std::string& stream, const std::string& counter, T value)
    {
        if constexpr (std::is_same_v<T, std::string>) {
            rows_.push_back({entity, stream, counter, value});
        } else {
            rows_.push_back({entity, stream, counter, std::to_string(value)});
        }
    }

private:
    std::vector<report_row>& rows_;
};

void ru_stream_rows(row_sink& out, const std::string& name, const reception_counters& c, std::uint64_t sent,
                    std::uint64_t dropped)
{
    out.add("ru", name, "sent", sent);
    out.add("ru", name, "link_dropped", dropped);
    out.add("ru", name, "on_time", c.on_time);
    out.add("ru", name, "early_dropped", c.early_dropped);
    out.add("ru", name, "late_dropped", c.late_dropped);
    out.add("ru", name, "no_context_dropped", c.no_context_dropped);
    out.add("ru", name, "decode_error", c.decode_error);
    out.add("ru", name, "on_time_pct", pct(c.on_time, c.total()));
}

std::string quote_csv(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') {
            q += '"';
        }
        q += c;
    }
    return q + "\"";
}

} // namespace

std::vector<report_row> build_report(const scenario& sc, const run_result& r)
{
    std::vector<report_row> rows;
    row_sink                out(rows);

    out.add("scenario", "config", "n_frames", sc.n_frames);
    out.add("scenario", "config", "slots", sc.nof_slots());
    out.add("scenario", "config", "ports", sc.nof_ports);
    out.add("scenario", "config", "seed", sc.seed);

    ru_stream_rows(out, "cplane_dl", r.ru.cplane_dl, r.du.cplane_dl_sent, r.link.cplane_dl_dropped);
    ru_stream_rows(out, "cplane_ul", r.ru.cplane_ul, r.du.cplane_ul_sent, r.link.cplane_ul_dropped);
    ru_stream_rows(out, "uplane_dl", r.ru.uplane_dl, r.du.uplane_dl_sent, r.link.uplane_dl_dropped);
    out.add("ru", "unclassified", "decode_error", r.ru.unclassified.decode_error);
    out.add("ru", "lowphy", "dl_slots_modulated", r.ru.dl_slots_modulated);
    out.add("ru", "lowphy", "dl_slots_silent", r.ru.dl_slots_silent);
    out.add("ru", "lowphy", "ul_slots_emitted", r.ru.ul_slots_emitted);
    out.add("ru", "lowphy", "prach_occasions_emitted", r.ru.prach_occasions_emitted);
    out.add("ru", "lowphy", "ul_frames_enqueued", r.ru.ul_frames_enqueued);

    const std::uint64_t ul_received = r.du.ul_on_time + r.du.ul_early + r.du.ul_late + r.du.ul_decode_errors;
    out.add("du", "uplane_ul", "sent", r.ta3.frames);
    out.add("du", "uplane_ul", "link_dropped", r.link.uplane_ul_dropped);
    out.add("du", "uplane_ul", "on_time", r.du.ul_on_time);
    out.add("du", "uplane_ul", "early_dropped", r.du.ul_early);
    out.add("du", "uplane_ul", "late_dropped", r.du.ul_late);
    out.add("du", "uplane_ul", "decode_error", r.du.ul_decode_errors);
    out.add("du", "uplane_ul", "seq_gaps", r.du.ul_seq_gaps);
    out.add("du", "uplane_ul", "duplicates", r.du.ul_duplicates);
    out.add("du", "uplane_ul", "prach_frames", r.du.ul_prach_frames);
    out.add("du", "uplane_ul", "on_time_pct", pct(r.du.ul_on_time, ul_received));
    out.add("du", "schedule", "dl_slots", r.du.dl_slots_scheduled);
    out.add("du", "schedule", "ul_slots", r.du.ul_slots_scheduled);
    out.add("du", "schedule", "prach_occasions", r.du.prach_occasions_scheduled);
    out.add("du", "lambda", "count", r.du.lambda_count);
    out.add("du", "lambda", "min_us", r.du.lambda_min_us);
    out.add("du", "lambda", "max_us", r.du.lambda_max_us);
    out.add("du", "lambda", "mean_us", fixed(r.du.lambda_mean_us(), 3));

    const integrity_report& ir = r.integrity;
    out.add("integrity", "dl", "slots_checked", ir.dl_slots_checked);
    out.add("integrity", "dl", "failures", ir.dl_failures);
    out.add("integrity", "silence", "slots_checked", ir.silent_slots_checked);
    out.add("integrity", "silence", "failures", ir.silent_failures);
    out.add("integrity", "ul", "sections_expected", ir.ul_sections_expected);
    out.add("integrity", "ul", "sections_received", ir.ul_sections_received);
    out.add("integrity", "ul", "failures", ir.ul_failures);
    out.add("integrity", "prach", "symbols_expected", ir.prach_symbols_expected);
    out.add("integrity", "prach", "symbols_received", ir.prach_symbols_received);
    out.add("integrity", "prach", "failures", ir.prach_failures);
    out.add("integrity", "prach", "tone_hits", ir.prach_tone_hits);
    out.add("integrity", "overall", "passed", ir.passed() ? 1 : 0);

    out.add("audit", "ta3", "frames", r.ta3.frames);
    out.add("audit", "ta3", "violations", r.ta3.violations);
    out.add("audit", "direction", "mismatches", r.direction_mismatches);

    auto delay_rows = [&](const char* dir, const std::optional<usec>& lo, const std::optional<usec>& hi) {
        out.add("link", dir, "min_delay_us", lo ? lo->count() : 0);
        out.add("link", dir, "max_delay_us", hi ? hi->count() : 0);
    };
    delay_rows("dl", r.link.dl_min_delay, r.link.dl_max_delay);
    delay_rows("ul", r.link.ul_min_delay, r.link.ul_max_delay);

    for (const profile_finding& f : validate_pair(sc.ru_profile, sc.du_profile, sc.fh)) {
        out.add("profile", f.field, "warning", f.level == profile_finding::severity::warning ? 1 : 0);
        out.add("profile", f.field, "excess_us", f.excess_us);
    }
    return rows;
}

std::string to_csv(const std::vector<report_row>& rows)
{
    std::string s = "entity,stream,counter,value\n";
    for (const report_row& r : rows) {
        s += quote_csv(r.entity) + ',' + quote_csv(r.stream) + ',' + quote_csv(r.counter) + ',' + quote_csv(r.value) +
             '\n';
    }
    return s;
}

run_verdict assess(const run_result& r)
{
    run_verdict v;
    auto        check = [&](std::uint64_t n, const std::string& what) {
        if (n != 0) {
            v.clean = false;
            v.reasons.push_back(std::to_string(n) + " " + what);
        }
    };
    auto stream = [&](const std::string& name, const reception_counters& c) {
        check(c.early_dropped, name + " early drops");
        check(c.late_dropped, name + " late drops");
        check(c.no_context_dropped, name + " no-context drops");
        check(c.decode_error, name + " decode errors");
    };
    stream("RU C-plane DL", r.ru.cplane_dl);
    stream("RU C-plane UL", r.ru.cplane_ul);
    stream("RU U-plane DL", r.ru.uplane_dl);
    check(r.ru.unclassified.decode_error, "RU unclassified decode errors");
    check(r.du.ul_early, "DU UL early drops");
    check(r.du.ul_late, "DU UL late drops");
    check(r.du.ul_decode_errors, "DU UL decode errors");
    check(r.du.ul_seq_gaps, "DU UL sequence gaps");
    check(r.du.ul_duplicates, "DU UL duplicates");
    check(r.link.cplane_dl_dropped + r.link.cplane_ul_dropped + r.link.uplane_dl_dropped + r.link.uplane_ul_dropped,
          "frames lost on the link");
    check(r.ta3.violations, "UL transmissions outside Ta3");
    check(r.direction_mismatches, "slots where RU activity differs from the DU schedule");
    if (!r.integrity.passed()) {
        v.clean = false;
        v.reasons.push_back("data integrity check failed");
    }
    return v;
}

capture_analysis analyze_capture(const capture_file& capture, const ru_config& ru_cfg,
                                 const du_delay_profile& du_profile)
{
    capture_analysis  a;
    const codec_config codec{ru_cfg.numerology.mu, ru_cfg.numerology.nof_prb, ru_cfg.layout};
    sequence_tracker  tracker;
    a.ru = replay(capture, ru_cfg);

    for (const capture_record& r : capture.records) {
        (r.direction == capture_direction::du_to_ru ? a.du_to_ru_frames : a.ru_to_du_frames)++;
        frame_header h;
        app_header   app;
        try {
            h   = decode_header(r.bytes, codec);
            app = peek_app_header(r.bytes);
        } catch (const decode_error&) {
            if (r.direction == capture_direction::ru_to_du) {
                a.ul_decode_errors++;
            }
            continue;
        }
        const ofh_plane plane = h.msg_type == ecpri_msg_type::rt_control ? ofh_plane::control : ofh_plane::user;
        const std::uint16_t raw = h.eaxc.pack(ru_cfg.layout);
        stream_summary&     s   = a.streams[stream_key{r.direction, plane, app.direction, raw}];
        s.frames++;
        const seq_result sr = tracker.track(raw, app.direction, plane, h.seq_id);
        if (sr.status == seq_status::gap) {
            s.gaps += sr.missing;
        } else if (sr.status == seq_status::duplicate) {
            s.duplicates++;
        }

        if (r.direction == capture_direction::ru_to_du) {
            try {
                const decoded_uplane u   = decode_uplane(r.bytes, codec);
                const auto&          tb  = ru_cfg.timebase;
                const std::int64_t   abs = tb.resolve(u.msg.app.frame_id, u.msg.app.subframe_id, u.msg.app.slot_id,
                                                      tb.slot_at(r.time));
                switch (check_window(window_kind::uplane_ul_rx, r.time, tb.ota_time(abs), du_profile)) {
                    case window_verdict::early:
                        a.ul_early++;
                        break;
                    case window_verdict::late:
                        a.ul_late++;
                        break;
                    case window_verdict::on_time:
                        a.ul_on_time++;
                        break;
                }
            } catch (const decode_error&) {
                a.ul_decode_errors++;
            }
        }
    }
    return a;
}

std::string format_analysis(const capture_analysis& a)
{
    std::ostringstream os;
    char               line[160];
    os << "capture: " << a.du_to_ru_frames << " DU->RU frames, " << a.ru_to_du_frames << " RU->DU frames\n\n";
    os << "RU reception      on_time    early     late  no_ctx  decode\n";
    auto ru_line = [&](const char* name, const reception_counters& c) {
        std::snprintf(line, sizeof(line), "  %-14s %8" PRIu64 " %8" PRIu64 " %8" PRIu64 " %7" PRIu64 " %7" PRIu64 "\n",
                      name, c.on_time, c.early_dropped, c.late_dropped, c.no_context_dropped, c.decode_error);
        os << line;
    };
    ru_line("cplane_dl", a.ru.cplane_dl);
    ru_line("cplane_ul", a.ru.cplane_ul);
    ru_line("uplane_dl", a.ru.uplane_dl);
    ru_line("unclassified", a.ru.unclassified);
    os << "\nDU reception      on_time    early     late  decode\n";
    std::snprintf(line, sizeof(line), "  %-14s %8" PRIu64 " %8" PRIu64 " %8" PRIu64 " %7" PRIu64 "\n", "uplane_ul",
                  a.ul_on_time, a.ul_early, a.ul_late, a.ul_decode_errors);
    os << line;
    os << "\nstreams           eaxc   frames     gaps    dups\n";
    for (const auto& [k, s] : a.streams) {
        const std::string name = std::string(k.direction == capture_direction::du_to_ru ? "du>ru " : "ru>du ") +
                                 (k.plane == ofh_plane::control ? "C-" : "U-") +
                                 (k.data_dir == data_direction::downlink ? "DL" : "UL");
        std::snprintf(line, sizeof(line), "  %-14s %6u %8" PRIu64 " %8" PRIu64 " %7" PRIu64 "\n", name.c_str(),
                      static_cast<unsigned>(k.eaxc), s.frames, s.gaps, s.duplicates);
        os << line;
    }
    return os.str();
}

std::string format_ru_profile(const ru_delay_profile& p)
{
    std::ostringstream os;
    os << "parameter       max_us  min_us\n";
    auto row = [&](const char* name, usec mx, usec mn) {
        char line[80];
        std::snprintf(line, sizeof(line), "%-14s %7lld %7lld\n", name, static_cast<long long>(mx.count()),
                      static_cast<long long>(mn.count()));
        os << line;
    };
    row("t2a_cp_dl", p.t2a_max_cp_dl, p.t2a_min_cp_dl);
    row("t2a_cp_ul", p.t2a_max_cp_ul, p.t2a_min_cp_ul);
    row("t2a_up", p.t2a_max_up, p.t2a_min_up);
    row("ta3", p.ta3_max, p.ta3_min);
    return os.str();
}

std::string format_du_profile(const du_delay_profile& p)
{
    std::ostringstream os;
    os << "parameter       max_us  min_us\n";
    auto row = [&](const char* name, usec mx, usec mn) {
        char line[80];
        std::snprintf(line, sizeof(line), "%-14s %7lld %7lld\n", name, static_cast<long long>(mx.count()),
                      static_cast<long long>(mn.count()));
        os << line;
    };
    row("t1a_cp_dl", p.t1a_max_cp_dl, p.t1a_min_cp_dl);
    row("t1a_cp_ul", p.t1a_max_cp_ul, p.t1a_min_cp_ul);
    row("t1a_up", p.t1a_max_up, p.t1a_min_up);
    row("ta4", p.ta4_max, p.ta4_min);
    return os.str();
}

std::string format_findings(const std::vector<profile_finding>& findings)
{
    std::ostringstream os;
    std::size_t        warnings = 0;
    for (const profile_finding& f : findings) {
        const bool warn = f.level == profile_finding::severity::warning;
        warnings += warn ? 1 : 0;
        char line[96];
        std::snprintf(line, sizeof(line), "%-8s %-15s %6lld us  ", warn ? "WARNING" : "ok", f.field.c_str(),
                      static_cast<long long>(f.excess_us));
        os << line << f.detail << "\n";
    }
    os << warnings << " warning(s)\n";
    return os.str();
}

} // namespace ofhsim
