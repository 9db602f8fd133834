"""Prompt text used by the evaluation chain.

Everything here is plain data so the wording can be tuned without touching
pipeline logic. Tests pin the assembled prompts byte-for-byte, so edits here
require regenerating the golden files.
"""

EVAL_SYSTEM_TEMPLATE = (
    "You are an expert UI design reviewer performing a heuristic evaluation of a "
    "single, static mobile UI screen.\n"
    "You will receive the UI as a JSON tree together with a list of design "
    "guidelines.\n"
    "Identify every place where the UI violates one of the guidelines. Report "
    "only violations of the guidelines listed below.\n"
    "\n"
    "Guidelines:\n"
    "{guidelines}"
)

UI_DESCRIPTION = (
    'The UI is described as a JSON tree. Each node has a unique "id", a "type" '
    "(GROUP, TEXT, IMAGE, ICON, BUTTON, INPUT, RECTANGLE, ...), and pixel "
    '"bounds" given as [x, y, width, height] measured from the top-left corner '
    'of the screen. Nodes may carry a "name", literal "text" content, a "font", '
    "and fill, background, and stroke colors. GROUP nodes list their members in "
    '"children"; all other nodes are leaves.'
)

EVAL_OUTPUT_FORMAT = (
    "Respond with a JSON array only, no prose. Each element must be an object "
    'with keys "guideline" (the exact name of the violated guideline), '
    '"elements" (an array of node ids involved), and "explanation" (one or two '
    "sentences describing the violation). If there are no violations, respond "
    "with []."
)

# Mistakes the model makes often enough to warrant a standing warning.
COMMON_ERROR_AVOIDANCE = (
    "Do not report violations about the mobile status bar (time, battery, or "
    "signal indicators).",
    "Do not suggest text labels for universally recognized icons such as the "
    "close 'X', the search magnifier, or the shopping cart.",
    "Elements of different sizes are center-aligned when their center "
    "coordinates match; never judge alignment from bounding-box edges alone.",
    "Bounding boxes may intersect while the rendered contents do not; do not "
    "report overlap from bounding-box intersection alone.",
)

EVAL_USER_TEMPLATE = (
    "Evaluate the following UI for guideline violations.\n"
    "\n"
    "{description}\n"
    "\n"
    "UI JSON:\n"
    "{ui_json}\n"
    "\n"
    "Avoid these common mistakes:\n"
    "{mistakes}\n"
    "\n"
    "{output_format}"
)

REPHRASE_SYSTEM = (
    "You rephrase UI guideline violations into constructive design feedback.\n"
    "For each violation, write three parts: \"standard\" states the expectation "
    'set by the guideline; "gap" describes how the current design falls short '
    'of that standard; "fix" says what to change to close the gap.\n'
    "Respond with a JSON array only, in the same order as the input violations, "
    'one object per violation, each with non-empty keys "standard", "gap", and '
    '"fix".'
)

REPHRASE_USER_TEMPLATE = "Violations:\n{violations}"

REFLECTION_REQUEST = (
    "The designer marked the violations above as incorrect or unhelpful. "
    "Reflect on why they missed the mark and how to avoid similar mistakes in "
    "the next evaluation. The element JSON shows the current state of the "
    "elements in question."
)

# Used when no transport is available at dismissal time.
REFLECTION_STUB = (
    "Understood. Those violations did not hold for this design. I will not "
    "repeat them and will weigh the surrounding context of these elements more "
    "carefully in the next evaluation."
)

LABEL_SYSTEM = (
    "You name groups of UI elements. For each group JSON you receive, write a "
    "short, descriptive, lowercase label that says what the group contains or "
    "does.\n"
    'Respond with a JSON object only, mapping each group\'s "id" to its label.'
)

LABEL_USER_TEMPLATE = "Label the following groups:\n{groups}"

# --- Ablation variants ------------------------------------------------------

ONE_CALL_SYSTEM_SUFFIX = (
    "\n\n"
    "Phrase every violation as constructive feedback with three parts: "
    '"standard" states the expectation set by the guideline; "gap" describes '
    'how the current design falls short of that standard; "fix" says what to '
    "change to close the gap."
)

ONE_CALL_OUTPUT_FORMAT = (
    "Respond with a JSON array only, no prose. Each element must be an object "
    'with keys "guideline" (the exact name of the violated guideline), '
    '"elements" (an array of node ids involved), and non-empty keys "standard", '
    '"gap", and "fix". If there are no violations, respond with [].'
)

NO_HEURISTICS_SYSTEM_TEMPLATE = (
    "You are an expert UI design reviewer performing a heuristic evaluation of a "
    "single, static mobile UI screen.\n"
    "You will receive the UI as a JSON tree.\n"
    "Look for {issue_phrases} and report every place where the UI falls short."
)

# Phrase used instead of a set's guideline bodies in the no-heuristics variant.
NO_HEURISTICS_PHRASES = {
    "nielsen": "usability issues",
    "crowdcrit": "visual design issues",
    "semantic": "semantic group issues",
}
NO_HEURISTICS_FALLBACK_PHRASE = "design issues"

NO_HEURISTICS_OUTPUT_FORMAT = (
    "Respond with a JSON array only, no prose. Each element must be an object "
    'with keys "issue" (a short name for the kind of issue), "elements" (an '
    'array of node ids involved), and "explanation" (one or two sentences '
    "describing the issue). If there are no issues, respond with []."
)

GENERAL_FEEDBACK_SYSTEM = (
    "You are an expert UI design reviewer looking at a single, static mobile UI "
    "screen.\n"
    "You will receive the UI as a JSON tree.\n"
    "Give feedback on the design of this UI."
)

GENERAL_FEEDBACK_USER_TEMPLATE = (
    "Give feedback on the following UI.\n"
    "\n"
    "{description}\n"
    "\n"
    "UI JSON:\n"
    "{ui_json}\n"
    "\n"
    "Avoid these common mistakes:\n"
    "{mistakes}\n"
    "\n"
    "{output_format}"
)

GENERAL_FEEDBACK_OUTPUT_FORMAT = (
    "Respond with a JSON array only, no prose. Each element must be an object "
    'with keys "elements" (an array of node ids involved) and "explanation" '
    "(one or two sentences of feedback). If you have no feedback, respond with []."
)
