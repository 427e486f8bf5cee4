const HTML_ESCAPES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
  "'": "&#39;",
};

export function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (ch) => HTML_ESCAPES[ch]);
}

// All numeric cells show one decimal place; the underlying value is always
// an API field, never something computed here.
export function fmt1(value: number | null | undefined): string {
  return value === null || value === undefined ? "Coming Soon" : value.toFixed(1);
}

export function fmt2(value: number): string {
  return value.toFixed(2);
}

export function fmtDelta(value: number): string {
  const arrow = value > 0 ? "↑" : value < 0 ? "↓" : "→";
  const sign = value > 0 ? "+" : "";
  return `${arrow} ${sign}${value.toFixed(2)}`;
}
