/* Aligns the bundled worked example and prints the cost and moves. */
#include <stdio.h>
#include <string.h>

#include "probalign.h"

static const char *CSV =
    "activity,e0,e1,e2\n"
    "a,0.3,0,0\n"
    "b,0.7,0.7,0.3\n"
    "c,0,0.3,0.7\n";

static int fail(const char *what) {
    fprintf(stderr, "%s: %s\n", what, pa_last_error_message());
    return 1;
}

int main(int argc, char **argv) {
    if (argc < 2) {
        fprintf(stderr, "usage: %s model.pnml\n", argv[0]);
        return 2;
    }
    PaNet *net = NULL;
    PaLog *log = NULL;
    PaAlignment *al = NULL;
    if (pa_net_read_pnml_file(argv[1], &net) != PA_STATUS_OK) return fail("model");
    if (pa_log_read_csv((const uint8_t *)CSV, strlen(CSV), "abc", 0, &log) != PA_STATUS_OK) return fail("log");
    if (pa_align_trace(net, log, 0, PA_COST_KIND_WEIGHTED, 0.4, 0, &al) != PA_STATUS_OK) return fail("align");

    printf("cost %.10f\n", pa_alignment_cost(al));
    for (size_t i = 0; i < pa_alignment_move_count(al); i++) {
        PaMove m;
        pa_alignment_move(al, i, &m);
        printf("move %zu kind %d event %lld weight %.2f\n", i, (int)m.kind, (long long)m.event, m.weight);
    }
    if (pa_align_trace(net, log, 0, PA_COST_KIND_WEIGHTED, 1.0, 0, &al) != PA_STATUS_INVALID_EPSILON) return 1;
    printf("rejected epsilon: %s\n", pa_last_error_message());

    pa_alignment_free(al);
    pa_log_free(log);
    pa_net_free(net);
    return 0;
}
