// Five icon slots filled to the API-served leaf count. Whole leaves only;
// the count is rendered verbatim, never derived from the score client-side.

export const MAX_LEAVES = 5;

export function renderLeaves(leaves: number | null): string {
  if (leaves === null) {
    return '<span class="leaves leaves-pending">Coming Soon</span>';
  }
  const slots: string[] = [];
  for (let i = 0; i < MAX_LEAVES; i++) {
    const filled = i < leaves;
    slots.push(
      `<span class="leaf ${filled ? "leaf-filled" : "leaf-empty"}">${filled ? "\u{1F343}" : "○"}</span>`,
    );
  }
  return `<span class="leaves" data-leaves="${leaves}" aria-label="${leaves} of ${MAX_LEAVES} leaves">${slots.join("")}</span>`;
}
