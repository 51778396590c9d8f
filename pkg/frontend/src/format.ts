export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function percent(fraction: number): string {
  return `${(fraction * 100).toFixed(2)}%`;
}

export function round(value: number, digits = 4): string {
  return value.toFixed(digits);
}

export function monthLabel(year: number, month: number): string {
  return `${year}-${String(month).padStart(2, "0")}`;
}

export function seriesMonths(startYear: number, startMonth: number, length: number): string[] {
  const labels: string[] = [];
  for (let i = 0; i < length; i++) {
    const total = startYear * 12 + (startMonth - 1) + i;
    labels.push(monthLabel(Math.floor(total / 12), (total % 12) + 1));
  }
  return labels;
}
